#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mar {

/// Dense row-major grid of doubles. Used both for images (square, n x n,
/// attenuation units) and sinograms (views x bins, line-integral units).
struct Grid {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Grid() = default;
    Grid(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {
        if (r < 0 || c < 0) throw std::invalid_argument("Grid: negative dimensions");
    }

    double& operator()(int i, int j) { return v[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }

    size_t size() const { return v.size(); }
    bool same_shape(const Grid& o) const { return rows == o.rows && cols == o.cols; }

    void fill(double x) { std::fill(v.begin(), v.end(), x); }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

using Image = Grid;     // square n x n
using Sinogram = Grid;  // m1 views x m2 bins

/// Binary mask over a grid (sinogram regions, image-domain metal masks).
struct Mask {
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> v;

    Mask() = default;
    Mask(int r, int c, uint8_t fill = 0) : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

    uint8_t& operator()(int i, int j) { return v[static_cast<size_t>(i) * cols + j]; }
    uint8_t operator()(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }

    size_t size() const { return v.size(); }
    bool same_shape(const Mask& o) const { return rows == o.rows && cols == o.cols; }

    size_t count() const {
        size_t n = 0;
        for (uint8_t b : v) n += (b != 0);
        return n;
    }
};

/// Pair of grids holding the two components of a discrete gradient field
/// (and the dual variables living in the same space).
struct GradField {
    Grid px;
    Grid py;

    GradField() = default;
    GradField(int r, int c) : px(r, c), py(r, c) {}

    bool same_shape(const GradField& o) const { return px.same_shape(o.px) && py.same_shape(o.py); }
};

inline double dot(const Grid& a, const Grid& b) {
    assert(a.same_shape(b));
    double s = 0.0;
    for (size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
    return s;
}

inline double dot(const GradField& a, const GradField& b) { return dot(a.px, b.px) + dot(a.py, b.py); }

inline double norm2(const Grid& a) { return std::sqrt(dot(a, a)); }
inline double norm2(const GradField& a) { return std::sqrt(dot(a, a)); }

inline Grid operator-(const Grid& a, const Grid& b) {
    assert(a.same_shape(b));
    Grid r(a.rows, a.cols);
    for (size_t k = 0; k < a.v.size(); ++k) r.v[k] = a.v[k] - b.v[k];
    return r;
}

inline Grid operator+(const Grid& a, const Grid& b) {
    assert(a.same_shape(b));
    Grid r(a.rows, a.cols);
    for (size_t k = 0; k < a.v.size(); ++k) r.v[k] = a.v[k] + b.v[k];
    return r;
}

inline Grid operator*(double t, const Grid& a) {
    Grid r(a.rows, a.cols);
    for (size_t k = 0; k < a.v.size(); ++k) r.v[k] = t * a.v[k];
    return r;
}

/// Elementwise (Hadamard) product.
inline Grid hadamard(const Grid& a, const Grid& b) {
    assert(a.same_shape(b));
    Grid r(a.rows, a.cols);
    for (size_t k = 0; k < a.v.size(); ++k) r.v[k] = a.v[k] * b.v[k];
    return r;
}

inline double max_abs(const Grid& a) {
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace mar
