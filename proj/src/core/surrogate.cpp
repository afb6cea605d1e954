#include "surrogate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "error.hpp"

namespace psim {

std::string_view to_string(Problem p) {
    switch (p) {
        case Problem::NavierStokes: return "navier_stokes";
        case Problem::Stress: return "stress";
        case Problem::Electromagnetic: return "electromagnetic";
    }
    return "unknown";
}

Problem parse_problem(std::string_view name) {
    if (name == "navier_stokes" || name == "ns") return Problem::NavierStokes;
    if (name == "stress") return Problem::Stress;
    if (name == "electromagnetic" || name == "em") return Problem::Electromagnetic;
    throw validation_error("unknown problem '" + std::string(name) + "' (expected ns, stress or em)");
}

std::string_view to_string(SuperResSource s) { return s == SuperResSource::SinXY ? "sin_xy" : "navier_stokes"; }

namespace {

// Runs fn(k) for k in [0, count) on up to `jobs` threads; rethrows the first
// failure in index order.
template <typename F>
void parallel_for(std::size_t count, int jobs, F&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), count);
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string format_value(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

}  // namespace

void SweepConfig::validate() const {
    if (parameter_values.size() < 3) throw validation_error("sweep needs at least three parameter values");
    for (std::size_t k = 0; k < parameter_values.size(); ++k) {
        if (!std::isfinite(parameter_values[k])) throw validation_error("non-finite sweep parameter");
        if (k > 0 && !(parameter_values[k] > parameter_values[k - 1])) {
            throw validation_error("sweep parameter values must be strictly increasing");
        }
    }
    if (test_values.empty()) throw validation_error("sweep needs at least one test value");
    for (double t : test_values) {
        if (std::find(parameter_values.begin(), parameter_values.end(), t) == parameter_values.end()) {
            throw validation_error("test value " + format_value(t) + " is not one of the sweep values");
        }
    }
    const auto train = train_values();
    if (train.size() < 2) throw validation_error("sweep needs at least two training values");
    const auto [tmin, tmax] = std::minmax_element(test_values.begin(), test_values.end());
    if (!(*tmin > train.front() && *tmax < train.back())) {
        throw validation_error("test values must lie strictly inside the training span (no extrapolation)");
    }
    forest.validate();
    switch (problem) {
        case Problem::NavierStokes:
            if (centerline_points < 2) throw validation_error("centerline_points must be >= 2");
            for (double re : parameter_values) {
                CavityConfig c = cavity;
                c.re = re;
                c.validate();
            }
            break;
        case Problem::Stress:
            if (plate_points < 2) throw validation_error("plate_points must be >= 2");
            for (double t : parameter_values) {
                PlateConfig p = plate;
                p.tension = t;
                p.validate();
            }
            break;
        case Problem::Electromagnetic:
            field_line.validate();
            for (double psi : parameter_values) {
                MagnetConfig m = magnet;
                m.psi0 = psi;
                m.validate();
            }
            break;
    }
}

std::vector<double> SweepConfig::train_values() const {
    std::vector<double> out;
    for (double v : parameter_values) {
        if (std::find(test_values.begin(), test_values.end(), v) == test_values.end()) out.push_back(v);
    }
    return out;
}

SimulationLines simulate_lines(const SweepConfig& cfg, double parameter) {
    SimulationLines out;
    switch (cfg.problem) {
        case Problem::NavierStokes: {
            CavityConfig c = cfg.cavity;
            c.re = parameter;
            CavitySolution sol = solve_cavity(c);
            CenterlineProfiles prof = centerline_profiles(sol, cfg.centerline_points);
            out.ids = {"u_vertical", "v_horizontal"};
            out.lines = {std::move(prof.u_vertical), std::move(prof.v_horizontal)};
            out.seconds = sol.wall_time_s;
            break;
        }
        case Problem::Stress: {
            PlateConfig p = cfg.plate;
            p.tension = parameter;
            auto [lines, secs] = time_block("stress", [&] { return sample_plate_lines(p, cfg.plate_points); });
            out.ids.assign(kPlateLineIds.begin(), kPlateLineIds.end());
            out.lines.assign(lines.begin(), lines.end());
            out.seconds = secs;
            break;
        }
        case Problem::Electromagnetic: {
            MagnetConfig m = cfg.magnet;
            m.psi0 = parameter;
            Stopwatch sw;
            MagnetSolution sol = solve_magnet(m);
            out.ids = {"h_line"};
            out.lines = {sample_field_line(sol, cfg.field_line)};
            out.seconds = sw.seconds();
            break;
        }
    }
    return out;
}

InterpolationResult interpolate_runs(const SweepConfig& cfg, const std::vector<SimulationLines>& runs, int jobs) {
    cfg.validate();
    if (runs.size() != cfg.parameter_values.size()) throw validation_error("one simulation run per sweep value expected");
    const std::size_t n_lines = runs.front().lines.size();
    for (const auto& r : runs) {
        if (r.lines.size() != n_lines) throw validation_error("simulation runs disagree on line count");
    }

    InterpolationResult result;
    for (const auto& r : runs) result.sim_seconds.push_back(r.seconds);
    double total = 0.0;
    for (double s : result.sim_seconds) total += s;
    result.sim_seconds_per_run = total / static_cast<double>(runs.size());

    auto is_test = [&](double v) {
        return std::find(cfg.test_values.begin(), cfg.test_values.end(), v) != cfg.test_values.end();
    };

    std::vector<std::size_t> test_idx;
    for (std::size_t k = 0; k < cfg.parameter_values.size(); ++k) {
        if (is_test(cfg.parameter_values[k])) test_idx.push_back(k);
    }
    // predicted[line][test]
    std::vector<std::vector<std::vector<double>>> predicted(n_lines);
    result.line_target_ranges.resize(n_lines);

    Stopwatch ml;
    for (std::size_t line = 0; line < n_lines; ++line) {
        RegressionDataset data({"parameter", "s"});
        for (std::size_t k = 0; k < runs.size(); ++k) {
            if (is_test(cfg.parameter_values[k])) continue;
            const SampleLine& sl = runs[k].lines[line];
            for (std::size_t p = 0; p < sl.s.size(); ++p) {
                const double feats[2] = {cfg.parameter_values[k], sl.s[p]};
                data.add_row(feats, sl.values[p]);
            }
        }
        const ForestModel model = fit(data, cfg.forest, tree_seed(cfg.seed, 0x11E0000ULL + line), jobs);
        result.line_target_ranges[line] = {model.target_min, model.target_max};
        for (std::size_t t : test_idx) {
            const SampleLine& actual = runs[t].lines[line];
            std::vector<double> queries;
            queries.reserve(actual.s.size() * 2);
            for (double s : actual.s) {
                queries.push_back(cfg.parameter_values[t]);
                queries.push_back(s);
            }
            predicted[line].push_back(model.predict_batch(queries));
        }
    }
    result.ml_train_predict_seconds = ml.seconds();

    for (std::size_t ti = 0; ti < test_idx.size(); ++ti) {
        const std::size_t t = test_idx[ti];
        TestCase tc;
        tc.parameter = cfg.parameter_values[t];
        std::vector<Metrics> parts;
        for (std::size_t line = 0; line < n_lines; ++line) {
            const SampleLine& actual = runs[t].lines[line];
            SampleLine pred{actual.line, actual.s, predicted[line][ti]};
            parts.push_back(compute_metrics(pred.values, actual.values));
            tc.lines.push_back({runs[t].ids[line], actual, std::move(pred)});
        }
        tc.metrics = aggregate(parts);
        result.tests.push_back(std::move(tc));
    }
    return result;
}

InterpolationResult run_interpolation(const SweepConfig& cfg, int jobs) {
    cfg.validate();
    std::vector<SimulationLines> runs(cfg.parameter_values.size());
    parallel_for(runs.size(), jobs, [&](std::size_t k) {
        try {
            runs[k] = simulate_lines(cfg, cfg.parameter_values[k]);
        } catch (const Error& e) {
            throw Error(e.kind(), "simulation at parameter " + format_value(cfg.parameter_values[k]) +
                                      " failed: " + e.what());
        }
    });
    return interpolate_runs(cfg, runs, jobs);
}

void SuperResConfig::validate() const {
    coarse.validate();
    fine.validate();
    forest.validate();
    if (fine.size() < coarse.size()) throw validation_error("fine grid must not have fewer nodes than the coarse grid");
    double x0 = coarse.x_min, x1 = coarse.x_max, y0 = coarse.y_min, y1 = coarse.y_max;
    for (const auto& a : augment) {
        if (!std::isfinite(a.at.x) || !std::isfinite(a.at.y) || !std::isfinite(a.target)) {
            throw validation_error("non-finite augmentation point");
        }
        x0 = std::min(x0, a.at.x);
        x1 = std::max(x1, a.at.x);
        y0 = std::min(y0, a.at.y);
        y1 = std::max(y1, a.at.y);
    }
    if (fine.x_min < x0 || fine.x_max > x1 || fine.y_min < y0 || fine.y_max > y1) {
        throw validation_error("fine grid extends beyond the training coordinate range (no extrapolation)");
    }
    if (source == SuperResSource::NavierStokes) {
        for (const GridSpec* g : {&coarse, &fine}) {
            if (g->nx != g->ny || *g != GridSpec::square(g->nx)) {
                throw validation_error("cavity super-resolution needs square grids over the unit square");
            }
            CavityConfig c = cavity;
            c.n = g->nx;
            c.re = base_re;
            c.validate();
        }
    }
}

SuperResResult run_superres(const SuperResConfig& cfg, int jobs) {
    cfg.validate();
    SuperResResult out;
    ScalarField2D coarse_field(cfg.coarse);
    if (cfg.source == SuperResSource::SinXY) {
        auto fill = [](ScalarField2D& f) {
            const GridSpec& g = f.spec();
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i) f(i, j) = std::sin(g.x(i) * g.y(j));
            }
        };
        fill(coarse_field);
        out.actual_fine = ScalarField2D(cfg.fine);
        fill(out.actual_fine);
    } else {
        CavityConfig c = cfg.cavity;
        c.re = cfg.base_re;
        CavityConfig cc = c, cf = c;
        cc.n = cfg.coarse.nx;
        cf.n = cfg.fine.nx;
        CavitySolution solutions[2];
        const CavityConfig* configs[2] = {&cc, &cf};
        parallel_for(2, jobs, [&](std::size_t k) { solutions[k] = solve_cavity(*configs[k]); });
        coarse_field = solutions[0].u;
        out.actual_fine = solutions[1].u;
        out.coarse_sim_seconds = solutions[0].wall_time_s;
        out.fine_sim_seconds = solutions[1].wall_time_s;
        out.coarse_converged = solutions[0].converged;
        out.fine_converged = solutions[1].converged;
    }

    Stopwatch sw;
    RegressionDataset data({"x", "y"});
    const GridSpec& cg = cfg.coarse;
    for (int j = 0; j < cg.ny; ++j) {
        for (int i = 0; i < cg.nx; ++i) {
            const double feats[2] = {cg.x(i), cg.y(j)};
            data.add_row(feats, coarse_field(i, j));
        }
    }
    for (const auto& a : cfg.augment) {
        const double feats[2] = {a.at.x, a.at.y};
        data.add_row(feats, a.target);
    }
    const ForestModel model = fit(data, cfg.forest, cfg.seed, jobs);
    const GridSpec& fg = cfg.fine;
    std::vector<double> queries;
    queries.reserve(fg.size() * 2);
    for (int j = 0; j < fg.ny; ++j) {
        for (int i = 0; i < fg.nx; ++i) {
            queries.push_back(fg.x(i));
            queries.push_back(fg.y(j));
        }
    }
    out.predicted_fine = ScalarField2D(fg, model.predict_batch(queries));
    out.forest_seconds = sw.seconds();

    out.metrics = compute_metrics(out.predicted_fine.values(), out.actual_fine.values());
    if (cfg.source == SuperResSource::NavierStokes) {
        out.speedup = out.fine_sim_seconds / (out.coarse_sim_seconds + out.forest_seconds);
    }
    return out;
}

std::array<SweepConfig, 3> canonical_sweeps() {
    SweepConfig ns;
    ns.problem = Problem::NavierStokes;
    for (int re = 200; re <= 600; re += 50) ns.parameter_values.push_back(re);
    ns.test_values = {300.0, 450.0};

    SweepConfig stress;
    stress.problem = Problem::Stress;
    for (int t = 0; t <= 20000; t += 2000) stress.parameter_values.push_back(t);
    stress.test_values = {6000.0, 18000.0};

    SweepConfig em;
    em.problem = Problem::Electromagnetic;
    // 0.2, 0.4, ..., 2.0 built from integers so 0.4 and 1.6 compare exactly.
    for (int k = 1; k <= 10; ++k) em.parameter_values.push_back(k * 2 / 10.0);
    em.test_values = {0.4, 1.6};

    return {ns, stress, em};
}

SuperResConfig canonical_sin_superres() {
    SuperResConfig cfg;
    cfg.source = SuperResSource::SinXY;
    cfg.coarse = {10, 10, 0.1, 1.0, 0.1, 1.0};
    cfg.fine = {100, 100, 0.01, 1.0, 0.01, 1.0};
    cfg.augment = {{{0.0, 0.0}, 0.0}};
    return cfg;
}

SuperResConfig canonical_ns_superres(int coarse_n, int fine_n) {
    SuperResConfig cfg;
    cfg.source = SuperResSource::NavierStokes;
    cfg.coarse = GridSpec::square(coarse_n);
    cfg.fine = GridSpec::square(fine_n);
    cfg.base_re = 400.0;
    return cfg;
}

}  // namespace psim
