#pragma once

#include "mar/grid.hpp"

namespace mar {

/// Which map onto the box S = {|px| <= 1, |py| <= 1} the dual p-step uses.
/// `Scaled` divides both components of a pixel by max(1, |px|, |py|); it lands
/// in S but is not the Euclidean projection when |px| != |py|.  `Clamp` is the
/// true Euclidean projection (componentwise clamp to [-1, 1]).
enum class SProjection { Scaled, Clamp };

/// Forward differences, Neumann (replicate) boundary, unit spacing:
/// px(i,j) = u(i,j+1) - u(i,j) for j < n-1 else 0, py analogous in i.
GradField grad(const Image& u);

/// Negative adjoint of grad: <grad u, p> = -<u, div p> holds to rounding.
Image div(const GradField& p);

/// sum |px| + |py|
double norm_l1(const GradField& p);

/// sum sqrt(px^2 + py^2)
double norm_l21(const GradField& p);

/// ||grad u||_1 - alpha * ||grad u||_{2,1}; nonnegative for 0 <= alpha <= 1.
double aitv_value(const Image& u, double alpha);

/// Pixelwise clamp to [0, c]. Rejects c <= 0.
Image proj_box(const Image& u, double c);

/// Per-pixel Euclidean projection onto the unit disk:
/// q_ij / max(1, sqrt(qx^2 + qy^2)).
GradField proj_disk(const GradField& q);

/// Map onto S (see SProjection).
GradField proj_box_pair(const GradField& p, SProjection mode);

/// Bound on ||grad|| for an n x n grid. Analytic mode returns sqrt(8);
/// power mode runs `iters` power iterations on grad^T grad from a seeded
/// random start and returns the Rayleigh-quotient norm estimate.
double grad_norm_bound(int n, bool power = false, int iters = 100);

}  // namespace mar
