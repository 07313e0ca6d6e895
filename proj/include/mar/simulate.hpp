#pragma once

#include <cstdint>
#include <limits>

#include "mar/geometry.hpp"
#include "mar/grid.hpp"
#include "mar/phantom.hpp"

namespace mar {

struct NoiseParams {
    double s0 = 1e5;  // incident photon count; +inf means noiseless
    uint64_t seed = 0;

    bool noiseless() const { return std::isinf(s0); }

    void validate() const {
        if (!noiseless() && !(s0 >= 1.0)) throw std::invalid_argument("noise: S0 must be >= 1");
    }
};

/// Polychromatic line integrals of the phantom:
/// Y0 = -log( sum_E w(E) exp(-sum_m mu_m(E) L_m) ) with L_m the forward
/// projection of material m's indicator map (path length in mm).
/// Spectrum and material energy grids must coincide exactly; there is no
/// interpolation across grids.
Sinogram poly_project(const PhantomSpec& ph, const FanBeamGeometry& g, const Spectrum& sp,
                      const MaterialTable& mt, int n);

/// Photon-counting noise: Y = -log(max(Poisson(S0 exp(-Y0))/S0, 1/S0)).
/// Entries are capped at log(S0) by the clamp. Sampling is seeded per row so
/// the result is independent of threading and bit-reproducible.
Sinogram add_poisson(const Sinogram& y0, const NoiseParams& np);

}  // namespace mar
