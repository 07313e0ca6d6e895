#include "mar/grid_ops.hpp"

#include <random>
#include <stdexcept>

namespace mar {

GradField grad(const Image& u) {
    const int n1 = u.rows, n2 = u.cols;
    GradField g(n1, n2);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            g.px(i, j) = (j < n2 - 1) ? u(i, j + 1) - u(i, j) : 0.0;
            g.py(i, j) = (i < n1 - 1) ? u(i + 1, j) - u(i, j) : 0.0;
        }
    }
    return g;
}

Image div(const GradField& p) {
    const int n1 = p.px.rows, n2 = p.px.cols;
    Image d(n1, n2);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            double s = 0.0;
            if (j < n2 - 1) s += p.px(i, j);
            if (j > 0) s -= p.px(i, j - 1);
            if (i < n1 - 1) s += p.py(i, j);
            if (i > 0) s -= p.py(i - 1, j);
            d(i, j) = s;
        }
    }
    return d;
}

double norm_l1(const GradField& p) {
    double s = 0.0;
    for (size_t k = 0; k < p.px.v.size(); ++k) s += std::abs(p.px.v[k]) + std::abs(p.py.v[k]);
    return s;
}

double norm_l21(const GradField& p) {
    double s = 0.0;
    for (size_t k = 0; k < p.px.v.size(); ++k) s += std::hypot(p.px.v[k], p.py.v[k]);
    return s;
}

double aitv_value(const Image& u, double alpha) {
    GradField g = grad(u);
    return norm_l1(g) - alpha * norm_l21(g);
}

Image proj_box(const Image& u, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("proj_box: box bound c must be positive");
    Image r(u.rows, u.cols);
    for (size_t k = 0; k < u.v.size(); ++k) r.v[k] = std::min(std::max(u.v[k], 0.0), c);
    return r;
}

GradField proj_disk(const GradField& q) {
    GradField r(q.px.rows, q.px.cols);
    for (size_t k = 0; k < q.px.v.size(); ++k) {
        const double m = std::max(1.0, std::hypot(q.px.v[k], q.py.v[k]));
        r.px.v[k] = q.px.v[k] / m;
        r.py.v[k] = q.py.v[k] / m;
    }
    return r;
}

GradField proj_box_pair(const GradField& p, SProjection mode) {
    GradField r(p.px.rows, p.px.cols);
    if (mode == SProjection::Scaled) {
        for (size_t k = 0; k < p.px.v.size(); ++k) {
            const double m = std::max({1.0, std::abs(p.px.v[k]), std::abs(p.py.v[k])});
            r.px.v[k] = p.px.v[k] / m;
            r.py.v[k] = p.py.v[k] / m;
        }
    } else {
        auto clamp1 = [](double x) { return std::min(1.0, std::max(-1.0, x)); };
        for (size_t k = 0; k < p.px.v.size(); ++k) {
            r.px.v[k] = clamp1(p.px.v[k]);
            r.py.v[k] = clamp1(p.py.v[k]);
        }
    }
    return r;
}

double grad_norm_bound(int n, bool power, int iters) {
    if (n < 2) throw std::invalid_argument("grad_norm_bound: grid size must be >= 2");
    if (!power) return std::sqrt(8.0);

    // Power iteration on the symmetric PSD operator u -> -div(grad u).
    std::mt19937_64 rng(0x6d61722d6f70ULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Image x(n, n);
    for (double& e : x.v) e = uni(rng);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        const double nx = norm2(x);
        if (nx == 0.0) break;
        x = (1.0 / nx) * x;
        Image ax = -1.0 * div(grad(x));
        lambda = dot(x, ax);
        x = ax;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace mar
