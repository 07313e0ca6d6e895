#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mar {

/// Equiangular fan-beam scan geometry. Distances in mm, detector bins
/// centered on the central ray, views evenly spaced over angular_range.
struct FanBeamGeometry {
    double source_to_detector = 949.075;
    double source_to_iso = 541.0;
    double bin_width = 1.024;
    int num_views = 984;
    int num_bins = 888;
    double angular_range = 2.0 * std::numbers::pi;
    double image_pixel_size = 1.0;

    void validate() const {
        if (!(source_to_detector > source_to_iso) || !(source_to_iso > 0.0))
            throw std::invalid_argument("geometry: need source_to_detector > source_to_iso > 0");
        if (num_views < 1 || num_bins < 1) throw std::invalid_argument("geometry: need at least 1 view and 1 bin");
        if (!(bin_width > 0.0)) throw std::invalid_argument("geometry: bin_width must be positive");
        if (!(image_pixel_size > 0.0)) throw std::invalid_argument("geometry: image_pixel_size must be positive");
    }

    /// Fan half-angle subtended per bin.
    double delta_gamma() const { return bin_width / source_to_detector; }

    /// Radius of the region covered by all rays (outer edge of the fan).
    double scanner_fov_radius() const {
        const double gamma_edge = 0.5 * num_bins * delta_gamma();
        return source_to_iso * std::sin(std::min(gamma_edge, std::numbers::pi / 2.0));
    }

    /// Circumradius of an n x n image at this pixel size.
    double image_circumradius(int n) const { return 0.5 * n * image_pixel_size * std::numbers::sqrt2; }
};

}  // namespace mar
