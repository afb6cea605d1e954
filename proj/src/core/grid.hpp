/// @file grid.hpp
/// @brief Uniform node-centred 2D grids, scalar fields and line sampling.

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace psim {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Uniform node-centred grid. Node (i, j) sits at (x_min + i*hx, y_min + j*hy).
struct GridSpec {
    int nx = 2;
    int ny = 2;
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    /// Throws a validation error unless nx, ny >= 2 and both extents are positive.
    void validate() const;

    double hx() const { return (x_max - x_min) / (nx - 1); }
    double hy() const { return (y_max - y_min) / (ny - 1); }
    double x(int i) const { return i == nx - 1 ? x_max : x_min + i * hx(); }
    double y(int j) const { return j == ny - 1 ? y_max : y_min + j * hy(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    bool contains(double px, double py) const {
        return px >= x_min && px <= x_max && py >= y_min && py <= y_max;
    }

    /// Square n x n grid over [lo, hi]^2.
    static GridSpec square(int n, double lo = 0.0, double hi = 1.0) { return {n, n, lo, hi, lo, hi}; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// One value per node, row-major with j as the outer index.
class ScalarField2D {
public:
    ScalarField2D() = default;
    explicit ScalarField2D(const GridSpec& spec, double fill = 0.0);
    ScalarField2D(const GridSpec& spec, std::vector<double> values);

    const GridSpec& spec() const { return spec_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double& operator()(int i, int j) { return values_[index(i, j)]; }
    double operator()(int i, int j) const { return values_[index(i, j)]; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(spec_.nx) + static_cast<std::size_t>(i);
    }

    bool all_finite() const;

private:
    GridSpec spec_;
    std::vector<double> values_;
};

struct LineSpec {
    Point start;
    Point end;
    int n_points = 2;

    void validate() const;
    /// Point at arc-length fraction s in [0, 1].
    Point at(double s) const { return {start.x + s * (end.x - start.x), start.y + s * (end.y - start.y)}; }
    /// Evenly spaced arc-length fractions, s[0] = 0 and s[n-1] = 1 exactly.
    std::vector<double> fractions() const;
};

struct SampleLine {
    LineSpec line;
    std::vector<double> s;
    std::vector<double> values;

    Point point(std::size_t k) const { return line.at(s[k]); }
};

ScalarField2D make_grid(const GridSpec& spec);

/// Bilinear interpolation of the four enclosing nodes. Exact at nodes; throws an
/// out-of-domain error outside the field bounds.
double bilinear_at(const ScalarField2D& field, double x, double y);

SampleLine sample_line(const ScalarField2D& field, const LineSpec& line);

/// CSV `x,y,value` (plus `,mask` when a mask is given), one row per node in storage order.
void write_field_csv(const ScalarField2D& field, const std::filesystem::path& path,
                     std::span<const unsigned char> mask = {});

}  // namespace psim
