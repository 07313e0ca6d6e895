#include "mar/simulate.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "mar/projector.hpp"
#include "mar/rng.hpp"

namespace mar {

uint64_t poisson_sample(std::mt19937_64& rng, double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson_sample: mean must be nonnegative");
    if (mean == 0.0) return 0;

    if (mean < 10.0) {
        // inversion by sequential search
        const double p0 = std::exp(-mean);
        double p = p0, cdf = p0;
        const double u = uniform01(rng);
        uint64_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    // PTRS transformed rejection (Hormann 1993), valid for mean >= 10
    const double slam = std::sqrt(mean);
    const double llam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform01(rng) - 0.5;
        const double v = uniform01(rng);
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <= k * llam - mean - std::lgamma(k + 1.0))
            return static_cast<uint64_t>(kf);
    }
}

Sinogram poly_project(const PhantomSpec& ph, const FanBeamGeometry& g, const Spectrum& sp,
                      const MaterialTable& mt, int n) {
    std::set<std::string> used;
    for (const auto& e : ph.primitives) used.insert(e.material);

    // exact energy matching between the spectrum grid and every used material
    std::vector<std::vector<double>> mu(sp.energy_kev.size());  // [energy][material]
    std::vector<const Material*> mats;
    for (const auto& name : used) mats.push_back(&mt.find(name));
    for (size_t e = 0; e < sp.energy_kev.size(); ++e) {
        mu[e].resize(mats.size());
        for (size_t m = 0; m < mats.size(); ++m) {
            if (!mats[m]->mu_exact(sp.energy_kev[e], mu[e][m]))
                throw std::invalid_argument("poly_project: spectrum energy " +
                                            std::to_string(sp.energy_kev[e]) +
                                            " keV not tabulated for material '" + mats[m]->name +
                                            "' (energy grids must coincide exactly)");
        }
    }

    FanBeamProjector proj(g, n);
    std::vector<Sinogram> lengths(mats.size());
    {
        auto maps = material_maps(ph, n, mt);
        for (size_t m = 0; m < mats.size(); ++m) {
            size_t idx = 0;
            while (mt.materials[idx].name != mats[m]->name) ++idx;
            lengths[m] = proj.forward(maps[idx]);
        }
    }

    Sinogram y0(g.num_views, g.num_bins);
    for (size_t k = 0; k < y0.v.size(); ++k) {
        double trans = 0.0;
        for (size_t e = 0; e < sp.energy_kev.size(); ++e) {
            double expo = 0.0;
            for (size_t m = 0; m < mats.size(); ++m) expo += mu[e][m] * lengths[m].v[k];
            trans += sp.weight[e] * std::exp(-expo);
        }
        y0.v[k] = std::max(0.0, -std::log(trans));
    }
    return y0;
}

Sinogram add_poisson(const Sinogram& y0, const NoiseParams& np) {
    np.validate();
    for (double x : y0.v)
        if (x < 0.0) throw std::invalid_argument("add_poisson: negative projection entry");

    if (np.noiseless()) return y0;

    Sinogram y(y0.rows, y0.cols);
    const double s0 = np.s0;
    for (int i = 0; i < y0.rows; ++i) {
        std::mt19937_64 rng(mix_seed(np.seed + static_cast<uint64_t>(i) * 0x9e3779b97f4a7c15ULL));
        for (int j = 0; j < y0.cols; ++j) {
            const double mean = s0 * std::exp(-y0(i, j));
            const double count = static_cast<double>(poisson_sample(rng, mean));
            y(i, j) = -std::log(std::max(count / s0, 1.0 / s0));
        }
    }
    return y;
}

}  // namespace mar
