#include "mar/projector.hpp"

#include <random>
#include <stdexcept>

namespace mar {

FanBeamProjector::FanBeamProjector(FanBeamGeometry g, int n) : geom_(g), n_(n) {
    geom_.validate();
    if (n < 1) throw std::invalid_argument("projector: image size must be >= 1");
    if (geom_.image_circumradius(n) > geom_.scanner_fov_radius())
        throw std::invalid_argument("projector: image FOV exceeds scanner FOV");

    step_ = 0.5 * geom_.image_pixel_size;
    radius_ = geom_.image_circumradius(n) + geom_.image_pixel_size;

    view_cos_.resize(geom_.num_views);
    view_sin_.resize(geom_.num_views);
    for (int a = 0; a < geom_.num_views; ++a) {
        const double beta = geom_.angular_range * a / geom_.num_views;
        view_cos_[a] = std::cos(beta);
        view_sin_[a] = std::sin(beta);
    }
    gamma_cos_.resize(geom_.num_bins);
    gamma_sin_.resize(geom_.num_bins);
    const double dg = geom_.delta_gamma();
    for (int b = 0; b < geom_.num_bins; ++b) {
        const double gamma = (b - 0.5 * (geom_.num_bins - 1)) * dg;
        gamma_cos_[b] = std::cos(gamma);
        gamma_sin_[b] = std::sin(gamma);
    }
}

namespace {

// Parametric range [t0, t1] of the chord the ray (S + t d, |d| = 1) cuts from
// the circle of radius `radius` around the origin; false when it misses.
bool chord_range(double sx, double sy, double dx, double dy, double radius, double& t0, double& t1) {
    const double b = sx * dx + sy * dy;
    const double c = sx * sx + sy * sy - radius * radius;
    const double disc = b * b - c;
    if (disc <= 0.0) return false;
    const double r = std::sqrt(disc);
    t0 = -b - r;
    t1 = -b + r;
    return t1 > t0;
}

}  // namespace

Sinogram FanBeamProjector::forward(const Image& u) const {
    if (u.rows != n_ || u.cols != n_) throw std::invalid_argument("forward: image shape mismatch");
    Sinogram y(geom_.num_views, geom_.num_bins);
    const double px = geom_.image_pixel_size;
    const double half = 0.5 * (n_ - 1);
    for (int a = 0; a < geom_.num_views; ++a) {
        const double sx = geom_.source_to_iso * view_cos_[a];
        const double sy = geom_.source_to_iso * view_sin_[a];
        // central ray direction: source -> iso
        const double cx = -view_cos_[a], cy = -view_sin_[a];
        for (int b = 0; b < geom_.num_bins; ++b) {
            // rotate the central direction by the fan angle of this bin
            const double dx = gamma_cos_[b] * cx - gamma_sin_[b] * cy;
            const double dy = gamma_sin_[b] * cx + gamma_cos_[b] * cy;
            double t0, t1;
            if (!chord_range(sx, sy, dx, dy, radius_, t0, t1)) continue;
            const int nsteps = static_cast<int>((t1 - t0) / step_);
            double sum = 0.0;
            for (int k = 0; k < nsteps; ++k) {
                const double t = t0 + (k + 0.5) * step_;
                const double fx = (sx + t * dx) / px + half;   // column coordinate
                const double fy = half - (sy + t * dy) / px;   // row coordinate
                if (fx < 0.0 || fx > n_ - 1 || fy < 0.0 || fy > n_ - 1) continue;
                int j0 = static_cast<int>(fx);
                int i0 = static_cast<int>(fy);
                if (j0 == n_ - 1) --j0;
                if (i0 == n_ - 1) --i0;
                const double wx = fx - j0, wy = fy - i0;
                sum += (1.0 - wy) * ((1.0 - wx) * u(i0, j0) + wx * u(i0, j0 + 1)) +
                       wy * ((1.0 - wx) * u(i0 + 1, j0) + wx * u(i0 + 1, j0 + 1));
            }
            y(a, b) = sum * step_;
        }
    }
    return y;
}

Image FanBeamProjector::adjoint(const Sinogram& y) const {
    if (y.rows != geom_.num_views || y.cols != geom_.num_bins)
        throw std::invalid_argument("adjoint: sinogram shape mismatch");
    Image u(n_, n_);
    const double px = geom_.image_pixel_size;
    const double half = 0.5 * (n_ - 1);
    for (int a = 0; a < geom_.num_views; ++a) {
        const double sx = geom_.source_to_iso * view_cos_[a];
        const double sy = geom_.source_to_iso * view_sin_[a];
        const double cx = -view_cos_[a], cy = -view_sin_[a];
        for (int b = 0; b < geom_.num_bins; ++b) {
            const double val = y(a, b) * step_;
            if (val == 0.0) continue;
            const double dx = gamma_cos_[b] * cx - gamma_sin_[b] * cy;
            const double dy = gamma_sin_[b] * cx + gamma_cos_[b] * cy;
            double t0, t1;
            if (!chord_range(sx, sy, dx, dy, radius_, t0, t1)) continue;
            const int nsteps = static_cast<int>((t1 - t0) / step_);
            for (int k = 0; k < nsteps; ++k) {
                const double t = t0 + (k + 0.5) * step_;
                const double fx = (sx + t * dx) / px + half;
                const double fy = half - (sy + t * dy) / px;
                if (fx < 0.0 || fx > n_ - 1 || fy < 0.0 || fy > n_ - 1) continue;
                int j0 = static_cast<int>(fx);
                int i0 = static_cast<int>(fy);
                if (j0 == n_ - 1) --j0;
                if (i0 == n_ - 1) --i0;
                const double wx = fx - j0, wy = fy - i0;
                u(i0, j0) += (1.0 - wy) * (1.0 - wx) * val;
                u(i0, j0 + 1) += (1.0 - wy) * wx * val;
                u(i0 + 1, j0) += wy * (1.0 - wx) * val;
                u(i0 + 1, j0 + 1) += wy * wx * val;
            }
        }
    }
    return u;
}

namespace {

// Spatial ramp kernel for equiangular fan-beam FBP (Kak & Slaney ch. 3):
// parallel-beam Ram-Lak samples scaled by 0.5 * (gamma / sin gamma)^2.
std::vector<double> fan_kernel(int m, double dg, FbpFilter filter) {
    std::vector<double> h(2 * m - 1);
    if (filter == FbpFilter::RamLak) {
        for (int k = -(m - 1); k <= m - 1; ++k) {
            double ram;
            if (k == 0)
                ram = 1.0 / (4.0 * dg * dg);
            else if (k % 2 == 0)
                ram = 0.0;
            else
                ram = -1.0 / (std::numbers::pi * std::numbers::pi * k * k * dg * dg);
            h[k + m - 1] = ram;
        }
    } else {
        // Hann-windowed ramp built by inverse DFT of |f| * hann(f).
        const int M = 4 * m;
        for (int k = -(m - 1); k <= m - 1; ++k) {
            double s = 0.0;
            for (int q = 1; q <= M / 2; ++q) {
                const double f = static_cast<double>(q) / M;  // cycles per sample
                const double win = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * f));
                s += 2.0 * (f / dg) * win * std::cos(2.0 * std::numbers::pi * f * k);
            }
            h[k + m - 1] = s / (M * dg);
        }
    }
    for (int k = -(m - 1); k <= m - 1; ++k) {
        if (k != 0) {
            const double gamma = k * dg;
            const double corr = gamma / std::sin(gamma);
            h[k + m - 1] *= 0.5 * corr * corr;
        } else {
            h[k + m - 1] *= 0.5;
        }
    }
    return h;
}

}  // namespace

Image fbp(const Sinogram& y, const FanBeamGeometry& g, int n, FbpFilter filter) {
    g.validate();
    if (y.rows != g.num_views || y.cols != g.num_bins) throw std::invalid_argument("fbp: sinogram shape mismatch");
    if (g.num_views < 2) throw std::invalid_argument("fbp: need at least 2 views");

    const int m1 = g.num_views, m2 = g.num_bins;
    const double dg = g.delta_gamma();
    const double dso = g.source_to_iso;

    // cosine weighting, then ramp filtering per view
    Sinogram q(m1, m2);
    const std::vector<double> kern = fan_kernel(m2, dg, filter);
    std::vector<double> row(m2);
    for (int a = 0; a < m1; ++a) {
        for (int b = 0; b < m2; ++b) {
            const double gamma = (b - 0.5 * (m2 - 1)) * dg;
            row[b] = y(a, b) * dso * std::cos(gamma);
        }
        for (int b = 0; b < m2; ++b) {
            double s = 0.0;
            for (int bp = 0; bp < m2; ++bp) s += row[bp] * kern[b - bp + m2 - 1];
            q(a, b) = s * dg;
        }
    }

    // weighted backprojection
    Image u(n, n);
    const double px = g.image_pixel_size;
    const double half = 0.5 * (n - 1);
    const double dbeta = g.angular_range / m1;
    for (int a = 0; a < m1; ++a) {
        const double beta = g.angular_range * a / m1;
        const double vc = std::cos(beta), vs = std::sin(beta);
        const double sx = dso * vc, sy = dso * vs;
        for (int i = 0; i < n; ++i) {
            const double yy = (half - i) * px;
            for (int j = 0; j < n; ++j) {
                const double xx = (j - half) * px;
                const double rx = xx - sx, ry = yy - sy;
                const double l2 = rx * rx + ry * ry;
                // fan angle of the ray through this pixel (signed, relative to
                // the central source->iso direction)
                const double along = -(rx * vc + ry * vs);
                const double across = -(ry * vc - rx * vs);
                const double gamma = std::atan2(across, along);
                const double bf = gamma / dg + 0.5 * (m2 - 1);
                if (bf < 0.0 || bf > m2 - 1) continue;
                int b0 = static_cast<int>(bf);
                if (b0 == m2 - 1) --b0;
                const double wb = bf - b0;
                u(i, j) += dbeta / l2 * ((1.0 - wb) * q(a, b0) + wb * q(a, b0 + 1));
            }
        }
    }
    return u;
}

Image cgls(const LinearOperator& op, const Sinogram& y, int iters, const Image* x0) {
    if (iters < 1) throw std::invalid_argument("cgls: need at least 1 iteration");
    const int n = op.image_n();
    Image x = x0 ? *x0 : Image(n, n);
    Sinogram r = x0 ? y - op.forward(x) : y;
    Image s = op.adjoint(r);
    Image p = s;
    double gamma = dot(s, s);
    for (int it = 0; it < iters; ++it) {
        if (gamma == 0.0) break;
        Sinogram q = op.forward(p);
        const double qq = dot(q, q);
        if (qq == 0.0) break;
        const double alpha = gamma / qq;
        for (size_t k = 0; k < x.v.size(); ++k) x.v[k] += alpha * p.v[k];
        for (size_t k = 0; k < r.v.size(); ++k) r.v[k] -= alpha * q.v[k];
        s = op.adjoint(r);
        const double gamma_new = dot(s, s);
        const double beta = gamma_new / gamma;
        for (size_t k = 0; k < p.v.size(); ++k) p.v[k] = s.v[k] + beta * p.v[k];
        gamma = gamma_new;
    }
    return x;
}

double weighted_op_norm(const LinearOperator& op, const Sinogram* W, int iters, uint64_t seed) {
    if (iters < 1) throw std::invalid_argument("weighted_op_norm: need at least 1 iteration");
    const int n = op.image_n();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Image x(n, n);
    for (double& e : x.v) e = uni(rng);

    auto apply = [&](const Image& z) {
        Sinogram s = op.forward(z);
        if (W) {
            for (size_t k = 0; k < s.v.size(); ++k) s.v[k] *= W->v[k] * W->v[k];
        }
        return op.adjoint(s);
    };

    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        const double nx = norm2(x);
        if (nx == 0.0) return 0.0;
        x = (1.0 / nx) * x;
        Image ax = apply(x);
        lambda = dot(x, ax);
        x = ax;
    }
    return std::max(lambda, 0.0);
}

}  // namespace mar
