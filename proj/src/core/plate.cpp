#include "plate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace psim {

void PlateConfig::validate() const {
    if (!(tension >= 0.0) || !std::isfinite(tension)) throw validation_error("--tension must be finite and >= 0");
    if (!(hole_radius > 0.0) || !std::isfinite(hole_radius)) throw validation_error("hole radius must be positive");
    if (!(plate_half_width > hole_radius) || !std::isfinite(plate_half_width)) {
        throw validation_error("plate half width must exceed the hole radius");
    }
}

namespace {

// Points built from a*cos(45), a*sin(45) land a few ulps inside the circle.
constexpr double kHoleSlack = 1e-12;

}  // namespace

KirschStress kirsch_stress(const PlateConfig& cfg, double x, double y) {
    cfg.validate();
    const double r2 = x * x + y * y;
    const double a2 = cfg.hole_radius * cfg.hole_radius;
    if (!(r2 >= a2 * (1.0 - kHoleSlack))) {
        std::ostringstream msg;
        msg << "point (" << x << ", " << y << ") lies inside the hole of radius " << cfg.hole_radius;
        throw domain_error(msg.str());
    }
    const double rho = std::min(a2 / r2, 1.0);  // a^2 / r^2
    const double rho2 = rho * rho;              // a^4 / r^4
    const double r = std::sqrt(r2);
    const double c = x / r, s = y / r;
    const double cos2 = (x * x - y * y) / r2;
    const double sin2 = 2.0 * x * y / r2;

    // Unit-load stresses, scaled by T at the end so the result is linear in T.
    const double rr = 0.5 * (1.0 - rho) + 0.5 * (1.0 - 4.0 * rho + 3.0 * rho2) * cos2;
    const double tt = 0.5 * (1.0 + rho) - 0.5 * (1.0 + 3.0 * rho2) * cos2;
    const double rt = -0.5 * (1.0 + 2.0 * rho - 3.0 * rho2) * sin2;
    const double xx = rr * c * c + tt * s * s - 2.0 * rt * s * c;

    const double t = cfg.tension;
    return {t * rr, t * tt, t * rt, t * xx};
}

std::array<SampleLine, 3> sample_plate_lines(const PlateConfig& cfg, int n_points) {
    cfg.validate();
    const double a = cfg.hole_radius;
    const double w = cfg.plate_half_width;
    const double d = std::numbers::sqrt2 / 2.0;
    const std::array<LineSpec, 3> specs = {
        LineSpec{{a, 0.0}, {w, 0.0}, n_points},
        LineSpec{{0.0, a}, {0.0, w}, n_points},
        LineSpec{{a * d, a * d}, {w * d, w * d}, n_points},
    };
    std::array<SampleLine, 3> out;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        specs[k].validate();
        SampleLine line{specs[k], specs[k].fractions(), {}};
        line.values.reserve(line.s.size());
        for (double s : line.s) {
            const Point p = specs[k].at(s);
            line.values.push_back(sigma_xx_at(cfg, p.x, p.y));
        }
        out[k] = std::move(line);
    }
    return out;
}

PlateRaster rasterize_plate(const PlateConfig& cfg, const GridSpec& spec) {
    cfg.validate();
    PlateRaster out{ScalarField2D(spec), std::vector<unsigned char>(spec.size(), 0)};
    const double a2 = cfg.hole_radius * cfg.hole_radius;
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            const double x = spec.x(i), y = spec.y(j);
            if (x * x + y * y < a2 * (1.0 - kHoleSlack)) {
                out.in_hole[out.sigma_xx.index(i, j)] = 1;
                continue;
            }
            out.sigma_xx(i, j) = sigma_xx_at(cfg, x, y);
        }
    }
    return out;
}

}  // namespace psim
