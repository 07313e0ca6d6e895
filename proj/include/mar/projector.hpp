#pragma once

#include <cstdint>

#include "mar/geometry.hpp"
#include "mar/grid.hpp"

namespace mar {

/// Linear map between image and sinogram space with an exact adjoint.
/// The saddle-point solvers only see this interface, so tests can swap in
/// identity or dense operators.
struct LinearOperator {
    virtual ~LinearOperator() = default;
    virtual Sinogram forward(const Image& u) const = 0;
    virtual Image adjoint(const Sinogram& y) const = 0;
    virtual int image_n() const = 0;
    virtual int views() const = 0;
    virtual int bins() const = 0;
};

/// Ray-driven fan-beam projector with bilinear interpolation along each ray.
/// The adjoint is the exact transpose of the forward sampling, which the
/// primal-dual convergence theory requires.
class FanBeamProjector : public LinearOperator {
public:
    FanBeamProjector(FanBeamGeometry g, int n);

    Sinogram forward(const Image& u) const override;
    Image adjoint(const Sinogram& y) const override;
    int image_n() const override { return n_; }
    int views() const override { return geom_.num_views; }
    int bins() const override { return geom_.num_bins; }

    const FanBeamGeometry& geometry() const { return geom_; }

private:
    FanBeamGeometry geom_;
    int n_;
    double step_;    // marching step along the ray, mm
    double radius_;  // marching circle radius around iso, mm
    std::vector<double> view_cos_, view_sin_;
    std::vector<double> gamma_cos_, gamma_sin_;
};

enum class FbpFilter { RamLak, Hann };

/// Equiangular fan-beam filtered back projection (cosine weighting, ramp
/// kernel with the (gamma/sin gamma)^2 correction, 1/L^2 backprojection).
Image fbp(const Sinogram& y, const FanBeamGeometry& g, int n, FbpFilter filter = FbpFilter::RamLak);

/// `iters` steps of conjugate gradient on the normal equations of
/// min_u 0.5 ||A u - y||^2, started from x0 (zero when null).
Image cgls(const LinearOperator& op, const Sinogram& y, int iters, const Image* x0 = nullptr);

/// Power-iteration estimate of the largest eigenvalue of
/// u -> A^T (W .* W .* A u); W == nullptr means all-ones weights.
double weighted_op_norm(const LinearOperator& op, const Sinogram* W, int iters,
                        uint64_t seed = 0x57656967687453ULL);

}  // namespace mar
