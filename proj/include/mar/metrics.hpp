#pragma once

#include <limits>
#include <string>

#include "mar/grid.hpp"

namespace mar {

struct MetricReport {
    double psnr_db = 0.0;  // +inf when the images are identical
    double ssim = 0.0;
    double rel_error = 0.0;

    std::string to_json() const;
};

/// ||u - ref|| / ||ref||; rejects an all-zero reference.
double rel_error(const Image& u, const Image& ref);

/// 10 log10(peak^2 / MSE); peak <= 0 is rejected, peak = 0 sentinel not
/// allowed -- pass `psnr_auto_peak` for max(ref).
double psnr(const Image& u, const Image& ref, double peak);
double psnr_auto(const Image& u, const Image& ref);

/// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03
/// (Wang et al. constants), dynamic range taken from the joint min/max of the
/// two images so the measure is symmetric. Requires n >= 11.
double ssim(const Image& u, const Image& ref);

MetricReport compute_metrics(const Image& u, const Image& ref, const Mask* mask = nullptr);

}  // namespace mar
