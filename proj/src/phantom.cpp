#include "mar/phantom.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mar {

bool Ellipse::contains(double x_mm, double y_mm) const {
    const double dx = x_mm - cx_mm, dy = y_mm - cy_mm;
    const double c = std::cos(rot_rad), s = std::sin(rot_rad);
    const double lx = c * dx + s * dy;
    const double ly = -s * dx + c * dy;
    const double rx = lx / ax_mm, ry = ly / ay_mm;
    return rx * rx + ry * ry <= 1.0;
}

PhantomSpec PhantomSpec::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PhantomSpec ph;
    ph.fov_mm = j.at("fov_mm").get<double>();
    if (!(ph.fov_mm > 0.0)) throw std::invalid_argument("phantom: fov_mm must be positive");
    for (const auto& e : j.at("primitives")) {
        Ellipse el;
        el.cx_mm = e.at("center_mm").at(0).get<double>();
        el.cy_mm = e.at("center_mm").at(1).get<double>();
        el.ax_mm = e.at("semi_axes_mm").at(0).get<double>();
        el.ay_mm = e.at("semi_axes_mm").at(1).get<double>();
        el.rot_rad = e.value("rotation_rad", 0.0);
        el.material = e.at("material").get<std::string>();
        if (!(el.ax_mm > 0.0) || !(el.ay_mm > 0.0))
            throw std::invalid_argument("phantom: ellipse semi-axes must be positive");
        ph.primitives.push_back(el);
    }
    return ph;
}

PhantomSpec PhantomSpec::from_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("phantom: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_json_text(ss.str());
}

double Material::mu_at(double energy) const {
    if (energy < energy_kev.front() || energy > energy_kev.back())
        throw std::invalid_argument("material " + name + ": energy " + std::to_string(energy) +
                                    " keV outside tabulated range");
    auto it = std::lower_bound(energy_kev.begin(), energy_kev.end(), energy);
    const size_t hi = static_cast<size_t>(it - energy_kev.begin());
    if (hi == 0 || energy_kev[hi] == energy) return mu_per_mm[hi];
    const size_t lo = hi - 1;
    const double t = (energy - energy_kev[lo]) / (energy_kev[hi] - energy_kev[lo]);
    return (1.0 - t) * mu_per_mm[lo] + t * mu_per_mm[hi];
}

bool Material::mu_exact(double energy, double& out) const {
    for (size_t k = 0; k < energy_kev.size(); ++k) {
        if (energy_kev[k] == energy) {
            out = mu_per_mm[k];
            return true;
        }
    }
    return false;
}

const Material& MaterialTable::find(const std::string& name) const {
    for (const auto& m : materials)
        if (m.name == name) return m;
    throw std::invalid_argument("material table: unknown material '" + name + "'");
}

bool MaterialTable::has(const std::string& name) const {
    for (const auto& m : materials)
        if (m.name == name) return true;
    return false;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

void check_increasing(const std::vector<double>& e, const std::string& what) {
    for (size_t k = 1; k < e.size(); ++k)
        if (!(e[k] > e[k - 1])) throw std::invalid_argument(what + ": energies must be strictly increasing");
}

}  // namespace

MaterialTable MaterialTable::from_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("materials csv: empty file");
    auto header = split_csv_line(line);
    if (header.empty() || header[0] != "energy_kev")
        throw std::invalid_argument("materials csv: first column must be 'energy_kev'");

    MaterialTable mt;
    for (size_t c = 1; c < header.size(); ++c) {
        Material m;
        std::string name = header[c];
        const auto pos = name.find(":metal");
        if (pos != std::string::npos && pos + 6 == name.size()) {
            m.is_metal = true;
            name = name.substr(0, pos);
        }
        if (name.empty()) throw std::invalid_argument("materials csv: empty material name");
        m.name = name;
        mt.materials.push_back(m);
    }

    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw std::invalid_argument("materials csv: ragged row");
        const double e = std::stod(cells[0]);
        for (size_t c = 1; c < cells.size(); ++c) {
            const double mu = std::stod(cells[c]);
            if (mu < 0.0) throw std::invalid_argument("materials csv: negative attenuation");
            mt.materials[c - 1].energy_kev.push_back(e);
            mt.materials[c - 1].mu_per_mm.push_back(mu);
        }
    }
    if (mt.materials.empty() || mt.materials[0].energy_kev.empty())
        throw std::invalid_argument("materials csv: no data rows");
    for (const auto& m : mt.materials) check_increasing(m.energy_kev, "materials csv");
    return mt;
}

MaterialTable MaterialTable::from_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("materials csv: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_csv_text(ss.str());
}

Spectrum Spectrum::from_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("spectrum csv: empty file");
    auto header = split_csv_line(line);
    if (header.size() != 2 || header[0] != "energy_kev" || header[1] != "weight")
        throw std::invalid_argument("spectrum csv: header must be 'energy_kev,weight'");

    Spectrum sp;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 2) throw std::invalid_argument("spectrum csv: ragged row");
        sp.energy_kev.push_back(std::stod(cells[0]));
        sp.weight.push_back(std::stod(cells[1]));
    }
    check_increasing(sp.energy_kev, "spectrum csv");
    double total = 0.0;
    for (double w : sp.weight) {
        if (w < 0.0) throw std::invalid_argument("spectrum csv: negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("spectrum csv: needs at least one positive weight");
    for (double& w : sp.weight) w /= total;
    return sp;
}

Spectrum Spectrum::from_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("spectrum csv: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_csv_text(ss.str());
}

namespace {

// index of the topmost primitive covering the pixel center, -1 for background
int top_primitive(const PhantomSpec& ph, double x, double y) {
    for (int k = static_cast<int>(ph.primitives.size()) - 1; k >= 0; --k)
        if (ph.primitives[k].contains(x, y)) return k;
    return -1;
}

}  // namespace

Image rasterize(const PhantomSpec& ph, int n, double energy_kev, const MaterialTable& mt) {
    if (n < 1) throw std::invalid_argument("rasterize: image size must be >= 1");
    std::vector<double> mu(ph.primitives.size());
    for (size_t k = 0; k < ph.primitives.size(); ++k)
        mu[k] = mt.find(ph.primitives[k].material).mu_at(energy_kev);

    Image u(n, n);
    const double px = ph.fov_mm / n;
    const double half = 0.5 * (n - 1);
    for (int i = 0; i < n; ++i) {
        const double y = (half - i) * px;
        for (int j = 0; j < n; ++j) {
            const double x = (j - half) * px;
            const int k = top_primitive(ph, x, y);
            if (k >= 0) u(i, j) = mu[k];
        }
    }
    return u;
}

std::vector<Image> material_maps(const PhantomSpec& ph, int n, const MaterialTable& mt) {
    std::vector<int> mat_index(ph.primitives.size());
    for (size_t k = 0; k < ph.primitives.size(); ++k) {
        mat_index[k] = -1;
        for (size_t m = 0; m < mt.materials.size(); ++m)
            if (mt.materials[m].name == ph.primitives[k].material) mat_index[k] = static_cast<int>(m);
        if (mat_index[k] < 0)
            throw std::invalid_argument("material table: unknown material '" + ph.primitives[k].material + "'");
    }

    std::vector<Image> maps(mt.materials.size(), Image(n, n));
    const double px = ph.fov_mm / n;
    const double half = 0.5 * (n - 1);
    for (int i = 0; i < n; ++i) {
        const double y = (half - i) * px;
        for (int j = 0; j < n; ++j) {
            const double x = (j - half) * px;
            const int k = top_primitive(ph, x, y);
            if (k >= 0) maps[mat_index[k]](i, j) = 1.0;
        }
    }
    return maps;
}

}  // namespace mar
