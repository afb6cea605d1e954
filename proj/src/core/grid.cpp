#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "io.hpp"

namespace psim {

void GridSpec::validate() const {
    if (nx < 2 || ny < 2) {
        throw validation_error("grid needs at least 2 nodes per axis (got " + std::to_string(nx) + "x" +
                               std::to_string(ny) + ")");
    }
    if (!(x_max > x_min) || !(y_max > y_min) || !std::isfinite(x_min) || !std::isfinite(x_max) ||
        !std::isfinite(y_min) || !std::isfinite(y_max)) {
        throw validation_error("grid bounds must be finite with max > min");
    }
}

ScalarField2D::ScalarField2D(const GridSpec& spec, double fill) : spec_(spec) {
    spec_.validate();
    values_.assign(spec_.size(), fill);
}

ScalarField2D::ScalarField2D(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
    spec_.validate();
    if (values_.size() != spec_.size()) {
        throw validation_error("field has " + std::to_string(values_.size()) + " values, grid needs " +
                               std::to_string(spec_.size()));
    }
}

bool ScalarField2D::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void LineSpec::validate() const {
    if (n_points < 2) throw validation_error("line needs n_points >= 2");
    if (start.x == end.x && start.y == end.y) throw validation_error("line start and end coincide");
}

std::vector<double> LineSpec::fractions() const {
    std::vector<double> s(static_cast<std::size_t>(n_points));
    const double denom = n_points - 1;
    for (int k = 0; k < n_points; ++k) s[k] = k / denom;
    s.back() = 1.0;
    return s;
}

ScalarField2D make_grid(const GridSpec& spec) { return ScalarField2D(spec); }

namespace {

// Locate the cell containing coordinate u along one axis. Coordinates within a
// few ulps of a node snap onto it so node queries reproduce stored values.
void locate(double u, double lo, double h, int n, int& cell, double& frac) {
    const double pos = (u - lo) / h;
    const double nearest = std::round(pos);
    const double snap = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(pos));
    double p = std::abs(pos - nearest) <= snap ? nearest : pos;
    p = std::clamp(p, 0.0, static_cast<double>(n - 1));
    cell = std::min(static_cast<int>(std::floor(p)), n - 2);
    frac = p - cell;
}

}  // namespace

double bilinear_at(const ScalarField2D& field, double x, double y) {
    const GridSpec& g = field.spec();
    if (!std::isfinite(x) || !std::isfinite(y) || !g.contains(x, y)) {
        std::ostringstream msg;
        msg << "point (" << x << ", " << y << ") lies outside the grid [" << g.x_min << ", " << g.x_max << "] x ["
            << g.y_min << ", " << g.y_max << "]";
        throw domain_error(msg.str());
    }
    int i = 0, j = 0;
    double tx = 0.0, ty = 0.0;
    locate(x, g.x_min, g.hx(), g.nx, i, tx);
    locate(y, g.y_min, g.hy(), g.ny, j, ty);

    const double f00 = field(i, j), f10 = field(i + 1, j);
    const double f01 = field(i, j + 1), f11 = field(i + 1, j + 1);
    if (tx == 0.0 && ty == 0.0) return f00;
    if (tx == 1.0 && ty == 0.0) return f10;
    if (tx == 0.0 && ty == 1.0) return f01;
    if (tx == 1.0 && ty == 1.0) return f11;

    const double bottom = f00 + tx * (f10 - f00);
    const double top = f01 + tx * (f11 - f01);
    const double v = bottom + ty * (top - bottom);
    // Rounding can push a convex combination an ulp past its inputs.
    const auto [lo, hi] = std::minmax({f00, f10, f01, f11});
    return std::clamp(v, lo, hi);
}

SampleLine sample_line(const ScalarField2D& field, const LineSpec& line) {
    line.validate();
    const GridSpec& g = field.spec();
    for (const Point& p : {line.start, line.end}) {
        if (!g.contains(p.x, p.y)) {
            std::ostringstream msg;
            msg << "line endpoint (" << p.x << ", " << p.y << ") lies outside the grid";
            throw domain_error(msg.str());
        }
    }
    SampleLine out{line, line.fractions(), {}};
    out.values.reserve(out.s.size());
    for (double s : out.s) {
        const Point p = line.at(s);
        out.values.push_back(bilinear_at(field, p.x, p.y));
    }
    return out;
}

void write_field_csv(const ScalarField2D& field, const std::filesystem::path& path,
                     std::span<const unsigned char> mask) {
    const GridSpec& g = field.spec();
    if (!mask.empty() && mask.size() != g.size()) throw validation_error("mask size does not match field");
    CsvWriter csv;
    if (mask.empty()) {
        csv.header({"x", "y", "value"});
    } else {
        csv.header({"x", "y", "value", "mask"});
    }
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (mask.empty()) {
                csv.row({g.x(i), g.y(j), field(i, j)});
            } else {
                csv.row({g.x(i), g.y(j), field(i, j), static_cast<double>(mask[field.index(i, j)])});
            }
        }
    }
    csv.commit(path);
}

}  // namespace psim
