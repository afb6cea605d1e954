#include "magnet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "error.hpp"

namespace psim {

void MagnetConfig::validate() const {
    domain.validate();
    if (!(psi0 >= 0.0) || !std::isfinite(psi0)) throw validation_error("--psi0 must be finite and >= 0");
    if (!(magnet.x_max > magnet.x_min) || !(magnet.y_max > magnet.y_min)) {
        throw validation_error("magnet rectangle is degenerate");
    }
    if (!(magnet.x_min > domain.x_min && magnet.x_max < domain.x_max && magnet.y_min > domain.y_min &&
          magnet.y_max < domain.y_max)) {
        throw validation_error("magnet must lie strictly inside the domain");
    }
    if (!(solver_tol > 0.0)) throw validation_error("solver_tol must be positive");
    if (max_iters < 1) throw validation_error("max_iters must be >= 1");
    if (omega && !(*omega > 0.0 && *omega < 2.0)) throw validation_error("SOR omega must lie in (0, 2)");
}

namespace {

struct MagnetNodes {
    int i0 = 0, i1 = -1, j0 = 0, j1 = -1;
};

// Node index range covered by the magnet rectangle (inclusive, with a small
// tolerance so rectangle edges that coincide with grid lines are captured).
MagnetNodes magnet_nodes(const GridSpec& g, const Rect& m) {
    constexpr double eps = 1e-9;
    auto first = [](double lo, double origin, double h, int n) {
        return std::clamp(static_cast<int>(std::ceil((lo - origin) / h - eps)), 0, n - 1);
    };
    auto last = [](double hi, double origin, double h, int n) {
        return std::clamp(static_cast<int>(std::floor((hi - origin) / h + eps)), 0, n - 1);
    };
    return {first(m.x_min, g.x_min, g.hx(), g.nx), last(m.x_max, g.x_min, g.hx(), g.nx),
            first(m.y_min, g.y_min, g.hy(), g.ny), last(m.y_max, g.y_min, g.hy(), g.ny)};
}

}  // namespace

MagnetSolution solve_magnet(const MagnetConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const GridSpec& g = cfg.domain;
    const MagnetNodes mn = magnet_nodes(g, cfg.magnet);
    if (mn.i1 < mn.i0 || mn.j1 <= mn.j0) {
        throw validation_error("magnet must span at least one column and two rows of grid nodes");
    }
    if (mn.i0 < 1 || mn.i1 > g.nx - 2 || mn.j0 < 1 || mn.j1 > g.ny - 2) {
        throw validation_error("magnet nodes touch the outer boundary");
    }

    MagnetSolution sol;
    sol.magnet = cfg.magnet;
    sol.psi = ScalarField2D(g);
    sol.frozen.assign(g.size(), 0);
    ScalarField2D& psi = sol.psi;

    // Pole faces at +/-psi0, linear in y in between.
    const double y_bot = g.y(mn.j0), y_top = g.y(mn.j1);
    for (int j = mn.j0; j <= mn.j1; ++j) {
        const double t = j == mn.j1 ? 1.0 : (g.y(j) - y_bot) / (y_top - y_bot);
        const double value = cfg.psi0 * (2.0 * t - 1.0);
        for (int i = mn.i0; i <= mn.i1; ++i) {
            psi(i, j) = value;
            sol.frozen[psi.index(i, j)] = 1;
        }
    }

    const int n = std::max(g.nx, g.ny);
    const double omega = cfg.omega.value_or(2.0 / (1.0 + std::sin(std::numbers::pi / n)));
    const double hx2 = 1.0 / (g.hx() * g.hx());
    const double hy2 = 1.0 / (g.hy() * g.hy());
    const double wx = hx2 / (2.0 * (hx2 + hy2));
    const double wy = hy2 / (2.0 * (hx2 + hy2));
    const double tol = cfg.solver_tol * std::abs(cfg.psi0);
    const int nx = g.nx;
    double* p = psi.values().data();
    const unsigned char* frozen = sol.frozen.data();

    if (cfg.psi0 == 0.0) {
        sol.converged = true;
    } else {
        for (int it = 1; it <= cfg.max_iters; ++it) {
            double max_res = 0.0;
            for (int j = 1; j < g.ny - 1; ++j) {
                const std::size_t row = static_cast<std::size_t>(j) * nx;
                for (int i = 1; i < nx - 1; ++i) {
                    const std::size_t c = row + i;
                    if (frozen[c]) continue;
                    const double r = wx * (p[c - 1] + p[c + 1]) + wy * (p[c - nx] + p[c + nx]) - p[c];
                    max_res = std::max(max_res, std::abs(r));
                    p[c] += omega * r;
                }
            }
            sol.iters = it;
            if (!std::isfinite(max_res)) {
                throw Error(ErrorKind::SolverDiverged, "magnet potential solve produced non-finite values");
            }
            if (max_res <= tol) {
                sol.converged = true;
                break;
            }
        }
    }
    sol.h_mag = gradient_magnitude(psi);
    if (!psi.all_finite() || !sol.h_mag.all_finite()) {
        throw Error(ErrorKind::SolverDiverged, "magnet potential solve produced non-finite values");
    }
    sol.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

ScalarField2D gradient_magnitude(const ScalarField2D& f) {
    const GridSpec& g = f.spec();
    ScalarField2D out(g);
    const double hx = g.hx(), hy = g.hy();
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            double fx, fy;
            if (i == 0) {
                fx = (f(1, j) - f(0, j)) / hx;
            } else if (i == g.nx - 1) {
                fx = (f(i, j) - f(i - 1, j)) / hx;
            } else {
                fx = (f(i + 1, j) - f(i - 1, j)) / (2.0 * hx);
            }
            if (j == 0) {
                fy = (f(i, 1) - f(i, 0)) / hy;
            } else if (j == g.ny - 1) {
                fy = (f(i, j) - f(i, j - 1)) / hy;
            } else {
                fy = (f(i, j + 1) - f(i, j - 1)) / (2.0 * hy);
            }
            out(i, j) = std::hypot(fx, fy);
        }
    }
    return out;
}

LineSpec default_field_line() { return {{0.35, -1.5}, {0.35, 1.5}, 51}; }

namespace {

// Liang-Barsky clip of a segment against an axis-aligned rectangle.
bool segment_hits_rect(const Point& a, const Point& b, const Rect& r) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - r.x_min, r.x_max - a.x, a.y - r.y_min, r.y_max - a.y};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return false;
            continue;
        }
        const double t = q[k] / p[k];
        if (p[k] < 0.0) {
            t0 = std::max(t0, t);
        } else {
            t1 = std::min(t1, t);
        }
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace

SampleLine sample_field_line(const MagnetSolution& sol, const LineSpec& line) {
    line.validate();
    if (segment_hits_rect(line.start, line.end, sol.magnet)) {
        throw validation_error("sample line intersects the magnet");
    }
    return sample_line(sol.h_mag, line);
}

}  // namespace psim
