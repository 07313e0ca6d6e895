#pragma once

#include <string>
#include <vector>

#include "mar/grid.hpp"

namespace mar {

/// One additive phantom primitive; later primitives overwrite earlier ones
/// where they overlap.
struct Ellipse {
    double cx_mm = 0.0;
    double cy_mm = 0.0;
    double ax_mm = 1.0;  // semi-axis along local x
    double ay_mm = 1.0;  // semi-axis along local y
    double rot_rad = 0.0;
    std::string material;

    bool contains(double x_mm, double y_mm) const;
};

struct PhantomSpec {
    std::vector<Ellipse> primitives;
    double fov_mm = 0.0;  // physical width of the rasterized image

    static PhantomSpec from_json_file(const std::string& path);
    static PhantomSpec from_json_text(const std::string& text);
};

struct Material {
    std::string name;
    std::vector<double> energy_kev;  // strictly increasing
    std::vector<double> mu_per_mm;   // nonnegative
    bool is_metal = false;

    /// Linear interpolation; throws outside the tabulated range.
    double mu_at(double energy) const;
    /// Exact-match lookup; returns false when the energy is not tabulated.
    bool mu_exact(double energy, double& out) const;
};

struct MaterialTable {
    std::vector<Material> materials;

    const Material& find(const std::string& name) const;
    bool has(const std::string& name) const;

    /// CSV with header `energy_kev,<one column per material>`; a material
    /// column may carry a `:metal` suffix in the header to set the flag.
    static MaterialTable from_csv_file(const std::string& path);
    static MaterialTable from_csv_text(const std::string& text);
};

struct Spectrum {
    std::vector<double> energy_kev;  // strictly increasing
    std::vector<double> weight;      // nonnegative, normalized to sum 1 on load

    /// CSV with header `energy_kev,weight`.
    static Spectrum from_csv_file(const std::string& path);
    static Spectrum from_csv_text(const std::string& text);
};

/// n x n image of mu(E) of the topmost material covering each pixel center
/// (0 for background). Pixel grid spans [-fov/2, fov/2] in both axes.
Image rasterize(const PhantomSpec& ph, int n, double energy_kev, const MaterialTable& mt);

/// One indicator image per table material (1 where that material is topmost).
/// Indicators are disjoint and their union is the phantom support.
std::vector<Image> material_maps(const PhantomSpec& ph, int n, const MaterialTable& mt);

}  // namespace mar
