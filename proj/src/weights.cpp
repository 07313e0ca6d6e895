#include "mar/weights.hpp"

#include <stdexcept>

namespace mar {

Image MetalLabels::indicator(int k) const {
    Image m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int l = (*this)(i, j);
            if (l > 0 && (k == 0 || l == k)) m(i, j) = 1.0;
        }
    return m;
}

MetalLabels segment_metal(const Image& u_a, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("segment_metal: threshold must be positive");
    if (u_a.rows != u_a.cols) throw std::invalid_argument("segment_metal: image must be square");
    const int n = u_a.rows;

    MetalLabels out;
    out.n = n;
    out.label.assign(static_cast<size_t>(n) * n, 0);

    auto above = [&](int i, int j) { return u_a(i, j) >= threshold; };

    int next = 0;
    std::vector<std::pair<int, int>> stack;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!above(i, j) || out.label[static_cast<size_t>(i) * n + j] != 0) continue;
            ++next;
            stack.push_back({i, j});
            out.label[static_cast<size_t>(i) * n + j] = next;
            while (!stack.empty()) {
                auto [ci, cj] = stack.back();
                stack.pop_back();
                const int di[4] = {-1, 1, 0, 0};
                const int dj[4] = {0, 0, -1, 1};
                for (int d = 0; d < 4; ++d) {
                    const int ni = ci + di[d], nj = cj + dj[d];
                    if (ni < 0 || ni >= n || nj < 0 || nj >= n) continue;
                    if (!above(ni, nj) || out.label[static_cast<size_t>(ni) * n + nj] != 0) continue;
                    out.label[static_cast<size_t>(ni) * n + nj] = next;
                    stack.push_back({ni, nj});
                }
            }
        }
    }
    out.components = next;
    if (next == 0) throw std::runtime_error("segment_metal: no metal found above threshold");
    return out;
}

namespace {

Mask trace_of(const Image& indicator, const LinearOperator& op, double tol) {
    Sinogram s = op.forward(indicator);
    Mask m(s.rows, s.cols);
    for (size_t k = 0; k < s.v.size(); ++k) m.v[k] = (s.v[k] > tol) ? 1 : 0;
    return m;
}

}  // namespace

Mask metal_trace(const MetalLabels& labels, const LinearOperator& op, double tol) {
    if (labels.components == 0) return Mask(op.views(), op.bins());
    return trace_of(labels.indicator(0), op, tol);
}

Mask overlap_region(const MetalLabels& labels, const LinearOperator& op, double tol) {
    Mask om(op.views(), op.bins());
    if (labels.components < 2) return om;
    std::vector<Mask> traces(labels.components);
    for (int k = 1; k <= labels.components; ++k) traces[k - 1] = trace_of(labels.indicator(k), op, tol);
    for (int k = 0; k < labels.components; ++k)
        for (int l = k + 1; l < labels.components; ++l)
            for (size_t idx = 0; idx < om.v.size(); ++idx)
                if (traces[k].v[idx] && traces[l].v[idx]) om.v[idx] = 1;
    return om;
}

Mask high_atten_region(const Sinogram& y, const Mask& omega, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("high_atten_region: threshold level must be positive");
    if (y.rows != omega.rows || y.cols != omega.cols)
        throw std::invalid_argument("high_atten_region: shape mismatch");
    const double cutoff = t * max_abs(y);
    Mask ot(y.rows, y.cols);
    for (size_t k = 0; k < y.v.size(); ++k) ot.v[k] = (omega.v[k] && y.v[k] >= cutoff) ? 1 : 0;
    return ot;
}

Sinogram build_weight(const Sinogram& y, const Mask& omega_t, double eps, int* clamped, double cap) {
    if (!(eps > 0.0)) throw std::invalid_argument("build_weight: eps must be positive");
    if (y.rows != omega_t.rows || y.cols != omega_t.cols)
        throw std::invalid_argument("build_weight: shape mismatch");
    int nclamp = 0;
    Sinogram w(y.rows, y.cols);
    for (size_t k = 0; k < y.v.size(); ++k) {
        if (omega_t.v[k]) continue;
        double val = y.v[k];
        if (val < 0.0) {
            val = 0.0;
            ++nclamp;
        }
        w.v[k] = std::min(1.0 / std::max(std::sqrt(val), eps), cap);
    }
    if (clamped) *clamped = nclamp;
    return w;
}

Sinogram binary_complement(const Mask& omega) {
    Sinogram s(omega.rows, omega.cols);
    for (size_t k = 0; k < omega.v.size(); ++k) s.v[k] = omega.v[k] ? 0.0 : 1.0;
    return s;
}

}  // namespace mar
