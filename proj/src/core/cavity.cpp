#include "cavity.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>

#include "error.hpp"
#include "io.hpp"

namespace psim {

void CavityConfig::validate() const {
    if (!(re > 0.0) || !std::isfinite(re)) throw validation_error("--re must be a positive Reynolds number");
    if (n < 16) throw validation_error("cavity grid needs n >= 16 nodes per side");
    if (n % 2 == 0) throw validation_error("cavity grid needs an odd node count per side (got " + std::to_string(n) + ")");
    if (dt && !(*dt > 0.0)) throw validation_error("time step must be positive");
    if (!(steady_tol > 0.0)) throw validation_error("steady_tol must be positive");
    if (max_steps < 1) throw validation_error("max_steps must be >= 1");
    if (poisson_tol && !(*poisson_tol > 0.0)) throw validation_error("poisson_tol must be positive");
    if (poisson_max_iters < 1) throw validation_error("poisson_max_iters must be >= 1");
}

double CavityConfig::time_step() const {
    if (dt) return *dt;
    const double h = spacing();
    return 0.25 * std::min(h * h * re / 4.0, h);
}

namespace {

constexpr int kPad = 2;

}  // namespace

CavityStepper::CavityStepper(const CavityConfig& cfg)
    : cfg_(cfg), n_(cfg.n), h_(0.0), dt_(0.0), nu_(0.0), omega_(1.0) {
    cfg_.validate();
    h_ = cfg_.spacing();
    dt_ = cfg_.time_step();
    nu_ = 1.0 / cfg_.re;
    const GridSpec spec = GridSpec::square(n_);
    u_ = ScalarField2D(spec);
    v_ = ScalarField2D(spec);
    us_.assign(spec.size(), 0.0);
    vs_.assign(spec.size(), 0.0);
    rhs_.assign(spec.size(), 0.0);
    const int m = n_ - 2;
    phi_.assign(static_cast<std::size_t>(m + 2 * kPad) * (m + 2 * kPad), 0.0);
    // The wide stencil couples nodes two apart, so the slowest mode lives on a
    // half-resolution lattice.
    omega_ = 2.0 / (1.0 + std::sin(std::numbers::pi / ((n_ - 1) / 2.0)));
    build_operator();
    apply_boundary();
}

void CavityStepper::apply_boundary() {
    for (int k = 0; k < n_; ++k) {
        u_(k, 0) = 0.0;
        v_(k, 0) = 0.0;
        u_(0, k) = 0.0;
        v_(0, k) = 0.0;
        u_(n_ - 1, k) = 0.0;
        v_(n_ - 1, k) = 0.0;
    }
    for (int i = 0; i < n_; ++i) {
        u_(i, n_ - 1) = 1.0;
        v_(i, n_ - 1) = 0.0;
    }
}

// One axis of the Poisson operator: central divergence of the central gradient.
// The gradient lives on interior nodes only (walls keep their velocity) and uses
// linear extrapolation of the potential onto the wall nodes.
void CavityStepper::build_operator() {
    const int m = n_ - 2;
    const double inv2h = 1.0 / (2.0 * h_);
    // grad[a] as coefficients on phi[a-1], phi[a], phi[a+1] (interior indices).
    std::vector<std::array<double, 3>> grad(static_cast<std::size_t>(m), {0.0, 0.0, 0.0});
    for (int a = 0; a < m; ++a) {
        auto& g = grad[a];
        if (a == 0) {
            // phi_wall = 2 phi[0] - phi[1]
            g = {0.0, -2.0 * inv2h, 2.0 * inv2h};
        } else if (a == m - 1) {
            g = {-2.0 * inv2h, 2.0 * inv2h, 0.0};
        } else {
            g = {-inv2h, 0.0, inv2h};
        }
    }
    band_.assign(static_cast<std::size_t>(m) * 5, 0.0);
    for (int a = 0; a < m; ++a) {
        double* row = &band_[static_cast<std::size_t>(a) * 5];
        // (D g)[a] = (g[a+1] - g[a-1]) / 2h
        for (int side : {+1, -1}) {
            const int b = a + side;
            if (b < 0 || b >= m) continue;
            const double w = side * inv2h;
            for (int k = 0; k < 3; ++k) {
                const int col = b + k - 1;  // phi index
                row[col - a + 2] += w * grad[b][k];
            }
        }
    }
}

int CavityStepper::solve_pressure() {
    const int m = n_ - 2;
    const int stride = m + 2 * kPad;
    const double tol = cfg_.pressure_tol();
    double* phi = phi_.data();
    // Away from the walls both axes reduce to the wide stencil
    // (phi[-2] - 2 phi + phi[+2]) / 4h^2, which has no dependence on the
    // immediate neighbours.
    const double c = 1.0 / (4.0 * h_ * h_);
    const double relax = omega_ / (-4.0 * c);
    auto general = [&](int a, int b, double* p, double rhs) {
        const double* cx = &band_[static_cast<std::size_t>(a) * 5];
        const double* cy = &band_[static_cast<std::size_t>(b) * 5];
        const double off = cx[0] * p[-2] + cx[1] * p[-1] + cx[3] * p[1] + cx[4] * p[2] + cy[0] * p[-2 * stride] +
                           cy[1] * p[-stride] + cy[3] * p[stride] + cy[4] * p[2 * stride];
        const double diag = cx[2] + cy[2];
        const double r = rhs - off - diag * p[0];
        p[0] += omega_ * r / diag;
        return std::abs(r);
    };
    int it = 0;
    while (it < cfg_.poisson_max_iters) {
        ++it;
        double max_res = 0.0;
        for (int b = 0; b < m; ++b) {
            const double* rhs_row = &rhs_[static_cast<std::size_t>(b + 1) * n_ + 1];
            double* prow = phi + static_cast<std::size_t>(b + kPad) * stride + kPad;
            if (b < 2 || b >= m - 2) {
                for (int a = 0; a < m; ++a) max_res = std::max(max_res, general(a, b, prow + a, rhs_row[a]));
                continue;
            }
            for (int a = 0; a < 2; ++a) max_res = std::max(max_res, general(a, b, prow + a, rhs_row[a]));
            for (int a = 2; a < m - 2; ++a) {
                double* p = prow + a;
                const double r = rhs_row[a] - c * (p[-2] + p[2] + p[-2 * stride] + p[2 * stride] - 4.0 * p[0]);
                max_res = std::max(max_res, std::abs(r));
                p[0] += relax * r;
            }
            for (int a = std::max(2, m - 2); a < m; ++a) max_res = std::max(max_res, general(a, b, prow + a, rhs_row[a]));
        }
        if (max_res <= tol || !std::isfinite(max_res)) break;
    }
    return it;
}

double CavityStepper::step() {
    const int n = n_;
    const double h = h_;
    const double dt = dt_;
    const double nu = nu_;
    const double inv2h = 1.0 / (2.0 * h);
    const double invh2 = 1.0 / (h * h);
    const double* u = u_.values().data();
    const double* v = v_.values().data();

    std::copy(u, u + u_.values().size(), us_.begin());
    std::copy(v, v + v_.values().size(), vs_.begin());

    // Predictor: explicit central convection + diffusion.
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * n + i;
            const double uc = u[c], vc = v[c];
            const double ux = (u[c + 1] - u[c - 1]) * inv2h;
            const double uy = (u[c + n] - u[c - n]) * inv2h;
            const double vx = (v[c + 1] - v[c - 1]) * inv2h;
            const double vy = (v[c + n] - v[c - n]) * inv2h;
            const double lu = (u[c + 1] + u[c - 1] + u[c + n] + u[c - n] - 4.0 * uc) * invh2;
            const double lv = (v[c + 1] + v[c - 1] + v[c + n] + v[c - n] - 4.0 * vc) * invh2;
            us_[c] = uc + dt * (-uc * ux - vc * uy + nu * lu);
            vs_[c] = vc + dt * (-uc * vx - vc * vy + nu * lv);
        }
    }

    // Divergence of the intermediate velocity.
    bool finite = true;
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * n + i;
            rhs_[c] = (us_[c + 1] - us_[c - 1] + vs_[c + n] - vs_[c - n]) * inv2h;
            finite &= std::isfinite(rhs_[c]);
        }
    }
    auto diverged = [&] {
        return Error(ErrorKind::SolverDiverged, "cavity solver diverged at step " + std::to_string(steps_ + 1) +
                                                    " (Re=" + format_double(cfg_.re) + ")");
    };
    // std::max below would silently drop NaN, so blow-up is caught here instead.
    if (!finite) throw diverged();

    last_iters_ = solve_pressure();

    // Correction with the central gradient of the potential.
    const int m = n - 2;
    const int stride = m + 2 * kPad;
    const double* phi = phi_.data();
    auto pot = [&](int a, int b) { return phi[static_cast<std::size_t>(b + kPad) * stride + a + kPad]; };
    double* uo = u_.values().data();
    double* vo = v_.values().data();
    double change = 0.0;
    for (int b = 0; b < m; ++b) {
        for (int a = 0; a < m; ++a) {
            const double left = a == 0 ? 2.0 * pot(0, b) - pot(1, b) : pot(a - 1, b);
            const double right = a == m - 1 ? 2.0 * pot(m - 1, b) - pot(m - 2, b) : pot(a + 1, b);
            const double down = b == 0 ? 2.0 * pot(a, 0) - pot(a, 1) : pot(a, b - 1);
            const double up = b == m - 1 ? 2.0 * pot(a, m - 1) - pot(a, m - 2) : pot(a, b + 1);
            const std::size_t c = static_cast<std::size_t>(b + 1) * n + (a + 1);
            const double un = us_[c] - (right - left) * inv2h;
            const double vn = vs_[c] - (up - down) * inv2h;
            change = std::max({change, std::abs(un - uo[c]), std::abs(vn - vo[c])});
            uo[c] = un;
            vo[c] = vn;
        }
    }
    if (!std::isfinite(change) || !u_.all_finite() || !v_.all_finite()) throw diverged();
    ++steps_;
    return change;
}

CavitySolution solve_cavity(const CavityConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    CavityStepper stepper(cfg);
    CavitySolution sol;
    while (stepper.steps() < cfg.max_steps) {
        const double change = stepper.step();
        sol.residual_history.push_back(change);
        if (change <= cfg.steady_tol) {
            sol.converged = true;
            break;
        }
    }
    sol.u = stepper.u();
    sol.v = stepper.v();
    sol.steps_taken = stepper.steps();
    sol.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

double max_central_divergence(const ScalarField2D& u, const ScalarField2D& v) {
    const GridSpec& g = u.spec();
    const double inv2hx = 1.0 / (2.0 * g.hx());
    const double inv2hy = 1.0 / (2.0 * g.hy());
    double worst = 0.0;
    for (int j = 1; j < g.ny - 1; ++j) {
        for (int i = 1; i < g.nx - 1; ++i) {
            const double d = (u(i + 1, j) - u(i - 1, j)) * inv2hx + (v(i, j + 1) - v(i, j - 1)) * inv2hy;
            worst = std::max(worst, std::abs(d));
        }
    }
    return worst;
}

CenterlineProfiles centerline_profiles(const ScalarField2D& u, const ScalarField2D& v, int n_points) {
    const LineSpec vertical{{0.5, 0.0}, {0.5, 1.0}, n_points};
    const LineSpec horizontal{{0.0, 0.5}, {1.0, 0.5}, n_points};
    return {sample_line(u, vertical), sample_line(v, horizontal)};
}

ReferenceProfile read_reference_profile(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    std::size_t cs = 0, cv = 0;
    try {
        cs = table.column("station");
        cv = table.column("value");
    } catch (const Error& e) {
        throw parse_error(path.string() + ": " + e.what());
    }
    ReferenceProfile ref;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        try {
            ref.station.push_back(table.number(r, cs));
            ref.value.push_back(table.number(r, cv));
        } catch (const Error& e) {
            throw parse_error(path.string() + ": " + e.what());
        }
        if (ref.station.back() < 0.0 || ref.station.back() > 1.0) {
            throw parse_error(path.string() + ": station outside [0, 1] at row " + std::to_string(r + 1));
        }
    }
    if (ref.station.empty()) throw parse_error(path.string() + ": reference profile has no rows");
    return ref;
}

void write_reference_profile(const ReferenceProfile& ref, const std::filesystem::path& path) {
    CsvWriter csv;
    csv.header({"station", "value"});
    for (std::size_t k = 0; k < ref.station.size(); ++k) csv.row({ref.station[k], ref.value[k]});
    csv.commit(path);
}

double profile_at(const SampleLine& profile, double s) {
    const auto& xs = profile.s;
    if (!(s >= xs.front() && s <= xs.back())) throw domain_error("station outside the sampled profile");
    auto hi = std::upper_bound(xs.begin(), xs.end(), s);
    if (hi == xs.end()) return profile.values.back();
    const std::size_t k = static_cast<std::size_t>(hi - xs.begin());
    if (xs[k - 1] == s) return profile.values[k - 1];
    const double t = (s - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return profile.values[k - 1] + t * (profile.values[k] - profile.values[k - 1]);
}

Metrics validate_against_reference(const SampleLine& profile, const ReferenceProfile& ref) {
    std::vector<double> pred;
    pred.reserve(ref.station.size());
    for (double st : ref.station) pred.push_back(profile_at(profile, st));
    return compute_metrics(pred, ref.value);
}

Metrics validate_against_reference(const SampleLine& profile, const std::filesystem::path& reference_path) {
    return validate_against_reference(profile, read_reference_profile(reference_path));
}

}  // namespace psim
