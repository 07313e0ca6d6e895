#pragma once

#include "mar/grid.hpp"
#include "mar/projector.hpp"

namespace mar {

/// Image-domain metal segmentation: 0 = non-metal, k >= 1 labels the k-th
/// 4-connected component in scan order.
struct MetalLabels {
    int n = 0;
    std::vector<int> label;  // row-major n x n
    int components = 0;

    int operator()(int i, int j) const { return label[static_cast<size_t>(i) * n + j]; }

    /// Indicator of one component (1-based), or of all metal when k == 0.
    Image indicator(int k = 0) const;
};

/// Sinogram-domain regions the weight construction uses.
struct MaskSet {
    Mask omega;    // full metal trace
    Mask o_m;      // rays jointly through two separated metals
    Mask o_t;      // highly attenuated projections inside omega
    Mask omega_t;  // o_m | o_t
};

/// Thresholds u_a and labels the 4-connected metal components.
/// Throws when the mask is empty ("no metal found").
MetalLabels segment_metal(const Image& u_a, double threshold);

/// Omega(i,j) = 1 iff the forward projection of the metal indicator exceeds
/// tol (default 0: any ray touching metal).
Mask metal_trace(const MetalLabels& labels, const LinearOperator& op, double tol = 0.0);

/// Pairwise intersections of the per-component traces; empty for K = 1.
Mask overlap_region(const MetalLabels& labels, const LinearOperator& op, double tol = 0.0);

/// O_t = {(i,j) in omega | Y(i,j) >= t * max|Y|}. Accepts any t > 0; t > 1
/// naturally yields the empty set.
Mask high_atten_region(const Sinogram& y, const Mask& omega, double t);

inline Mask mask_union(const Mask& a, const Mask& b) {
    Mask r(a.rows, a.cols);
    for (size_t k = 0; k < a.v.size(); ++k) r.v[k] = (a.v[k] || b.v[k]) ? 1 : 0;
    return r;
}

/// W = 0 on omega_t, else 1 / max(sqrt(Y), eps). Negative Y entries are
/// clamped to 0 before the square root; `clamped` (when given) receives the
/// count so callers can warn. `cap` < inf additionally limits the weight.
Sinogram build_weight(const Sinogram& y, const Mask& omega_t, double eps, int* clamped = nullptr,
                      double cap = std::numeric_limits<double>::infinity());

/// 1 - B_omega as a {0,1}-valued sinogram (the binary baseline weight).
Sinogram binary_complement(const Mask& omega);

}  // namespace mar
