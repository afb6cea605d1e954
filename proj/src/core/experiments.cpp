#include "experiments.hpp"

#include <sstream>

#include "error.hpp"
#include "io.hpp"

namespace psim {

using nlohmann::json;

BenchmarkOptions BenchmarkOptions::fast(std::uint64_t seed, int jobs) {
    BenchmarkOptions o;
    o.seed = seed;
    o.jobs = jobs;
    o.ns_grid = 65;
    o.superres_coarse = 33;
    o.superres_fine = 129;
    return o;
}

namespace {

json forest_to_json(const ForestHyperparams& hp) {
    return {{"n_trees", hp.n_trees},
            {"max_depth", hp.max_depth ? json(*hp.max_depth) : json(nullptr)},
            {"min_samples_leaf", hp.min_samples_leaf},
            {"min_samples_split", hp.min_samples_split},
            {"bootstrap", hp.bootstrap}};
}

ForestHyperparams forest_from_json(const json& j) {
    ForestHyperparams hp;
    hp.n_trees = j.value("n_trees", hp.n_trees);
    if (j.contains("max_depth") && !j.at("max_depth").is_null()) hp.max_depth = j.at("max_depth").get<int>();
    hp.min_samples_leaf = j.value("min_samples_leaf", hp.min_samples_leaf);
    hp.min_samples_split = j.value("min_samples_split", hp.min_samples_split);
    hp.bootstrap = j.value("bootstrap", hp.bootstrap);
    return hp;
}

json grid_to_json(const GridSpec& g) {
    return {{"nx", g.nx}, {"ny", g.ny}, {"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min}, {"y_max", g.y_max}};
}

GridSpec grid_from_json(const json& j, GridSpec g) {
    g.nx = j.value("nx", g.nx);
    g.ny = j.value("ny", g.ny);
    g.x_min = j.value("x_min", g.x_min);
    g.x_max = j.value("x_max", g.x_max);
    g.y_min = j.value("y_min", g.y_min);
    g.y_max = j.value("y_max", g.y_max);
    return g;
}

json line_to_json(const LineSpec& l) {
    return {{"start", {l.start.x, l.start.y}}, {"end", {l.end.x, l.end.y}}, {"n_points", l.n_points}};
}

LineSpec line_from_json(const json& j, LineSpec l) {
    if (j.contains("start")) l.start = {j.at("start").at(0).get<double>(), j.at("start").at(1).get<double>()};
    if (j.contains("end")) l.end = {j.at("end").at(0).get<double>(), j.at("end").at(1).get<double>()};
    l.n_points = j.value("n_points", l.n_points);
    return l;
}

json cavity_to_json(const CavityConfig& c) {
    return {{"n", c.n},
            {"dt", c.dt ? json(*c.dt) : json("auto")},
            {"steady_tol", c.steady_tol},
            {"max_steps", c.max_steps},
            {"poisson_tol", c.pressure_tol()},
            {"poisson_max_iters", c.poisson_max_iters}};
}

CavityConfig cavity_from_json(const json& j, CavityConfig c) {
    c.n = j.value("n", c.n);
    if (j.contains("dt") && j.at("dt").is_number()) c.dt = j.at("dt").get<double>();
    c.steady_tol = j.value("steady_tol", c.steady_tol);
    c.max_steps = j.value("max_steps", c.max_steps);
    if (j.contains("poisson_tol")) c.poisson_tol = j.at("poisson_tol").get<double>();
    c.poisson_max_iters = j.value("poisson_max_iters", c.poisson_max_iters);
    return c;
}

std::string label_for(Problem p, double value) {
    std::ostringstream ss;
    switch (p) {
        case Problem::NavierStokes: ss << "Re="; break;
        case Problem::Stress: ss << "T="; break;
        case Problem::Electromagnetic: ss << "psi0="; break;
    }
    ss << value;
    return ss.str();
}

}  // namespace

json sweep_config_to_json(const SweepConfig& cfg) {
    json j = {{"problem", to_string(cfg.problem)},
              {"parameter_values", cfg.parameter_values},
              {"test_values", cfg.test_values},
              {"forest", forest_to_json(cfg.forest)},
              {"seed", cfg.seed}};
    switch (cfg.problem) {
        case Problem::NavierStokes:
            j["cavity"] = cavity_to_json(cfg.cavity);
            j["centerline_points"] = cfg.centerline_points;
            break;
        case Problem::Stress:
            j["plate"] = {{"hole_radius", cfg.plate.hole_radius}, {"plate_half_width", cfg.plate.plate_half_width}};
            j["plate_points"] = cfg.plate_points;
            break;
        case Problem::Electromagnetic:
            j["magnet"] = {{"domain", grid_to_json(cfg.magnet.domain)},
                           {"rect", {cfg.magnet.magnet.x_min, cfg.magnet.magnet.x_max, cfg.magnet.magnet.y_min,
                                     cfg.magnet.magnet.y_max}},
                           {"solver_tol", cfg.magnet.solver_tol},
                           {"max_iters", cfg.magnet.max_iters}};
            j["field_line"] = line_to_json(cfg.field_line);
            break;
    }
    return j;
}

SweepConfig sweep_config_from_json(const json& doc) {
    try {
        const Problem problem = parse_problem(doc.at("problem").get<std::string>());
        SweepConfig cfg = canonical_sweeps()[static_cast<std::size_t>(problem)];
        if (doc.contains("parameter_values")) cfg.parameter_values = doc.at("parameter_values").get<std::vector<double>>();
        if (doc.contains("test_values")) cfg.test_values = doc.at("test_values").get<std::vector<double>>();
        if (doc.contains("forest")) cfg.forest = forest_from_json(doc.at("forest"));
        cfg.seed = doc.value("seed", cfg.seed);
        if (doc.contains("cavity")) cfg.cavity = cavity_from_json(doc.at("cavity"), cfg.cavity);
        cfg.centerline_points = doc.value("centerline_points", cfg.centerline_points);
        if (doc.contains("plate")) {
            cfg.plate.hole_radius = doc.at("plate").value("hole_radius", cfg.plate.hole_radius);
            cfg.plate.plate_half_width = doc.at("plate").value("plate_half_width", cfg.plate.plate_half_width);
        }
        cfg.plate_points = doc.value("plate_points", cfg.plate_points);
        if (doc.contains("magnet")) {
            const json& m = doc.at("magnet");
            if (m.contains("domain")) cfg.magnet.domain = grid_from_json(m.at("domain"), cfg.magnet.domain);
            if (m.contains("rect")) {
                const auto r = m.at("rect").get<std::vector<double>>();
                if (r.size() != 4) throw validation_error("magnet.rect needs [x_min, x_max, y_min, y_max]");
                cfg.magnet.magnet = {r[0], r[1], r[2], r[3]};
            }
            cfg.magnet.solver_tol = m.value("solver_tol", cfg.magnet.solver_tol);
            cfg.magnet.max_iters = m.value("max_iters", cfg.magnet.max_iters);
        }
        if (doc.contains("field_line")) cfg.field_line = line_from_json(doc.at("field_line"), cfg.field_line);
        return cfg;
    } catch (const json::exception& e) {
        throw validation_error(std::string("invalid sweep config: ") + e.what());
    }
}

json superres_config_to_json(const SuperResConfig& cfg) {
    json aug = json::array();
    for (const auto& a : cfg.augment) aug.push_back({{"x", a.at.x}, {"y", a.at.y}, {"target", a.target}});
    json j = {{"source", to_string(cfg.source)},
              {"coarse", grid_to_json(cfg.coarse)},
              {"fine", grid_to_json(cfg.fine)},
              {"augment_points", std::move(aug)},
              {"forest", forest_to_json(cfg.forest)},
              {"seed", cfg.seed}};
    if (cfg.source == SuperResSource::NavierStokes) {
        j["base_re"] = cfg.base_re;
        json cav = cavity_to_json(cfg.cavity);
        cav.erase("n");
        j["cavity"] = std::move(cav);
    }
    return j;
}

SuperResConfig superres_config_from_json(const json& doc) {
    try {
        const std::string src = doc.at("source").get<std::string>();
        SuperResConfig cfg;
        if (src == "sin_xy" || src == "sin") {
            cfg = canonical_sin_superres();
        } else if (src == "navier_stokes" || src == "ns") {
            cfg = canonical_ns_superres();
        } else {
            throw validation_error("unknown super-resolution source '" + src + "' (expected sin_xy or navier_stokes)");
        }
        if (doc.contains("coarse")) cfg.coarse = grid_from_json(doc.at("coarse"), cfg.coarse);
        if (doc.contains("fine")) cfg.fine = grid_from_json(doc.at("fine"), cfg.fine);
        if (doc.contains("augment_points")) {
            cfg.augment.clear();
            for (const json& a : doc.at("augment_points")) {
                cfg.augment.push_back({{a.at("x").get<double>(), a.at("y").get<double>()}, a.at("target").get<double>()});
            }
        }
        if (doc.contains("forest")) cfg.forest = forest_from_json(doc.at("forest"));
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.base_re = doc.value("base_re", cfg.base_re);
        if (doc.contains("cavity")) cfg.cavity = cavity_from_json(doc.at("cavity"), cfg.cavity);
        return cfg;
    } catch (const json::exception& e) {
        throw validation_error(std::string("invalid super-resolution config: ") + e.what());
    }
}

std::vector<ReferenceValue> published_reference_values(std::string_view id) {
    if (id == "ns") {
        return {{"Re=300", "rmse", 0.00294}, {"Re=300", "mae", 0.00248},   {"Re=450", "rmse", 0.00342},
                {"Re=450", "mae", 0.00279},  {"timing", "sim_seconds_per_run", 1032.34},
                {"timing", "ml_train_predict_seconds", 0.10}};
    }
    if (id == "stress") {
        return {{"T=6000", "rmse", 91.56609},  {"T=6000", "mae", 82.86214},
                {"T=18000", "rmse", 0.071421}, {"T=18000", "mae", 0.035317},
                {"timing", "sim_seconds_per_run", 121.0}, {"timing", "ml_train_predict_seconds", 0.09}};
    }
    if (id == "em") {
        return {{"psi0=0.4", "rmse", 0.00504}, {"psi0=0.4", "mae", 0.00214},
                {"psi0=1.6", "rmse", 0.06541}, {"psi0=1.6", "mae", 0.02782},
                {"timing", "sim_seconds_per_run", 0.06}, {"timing", "ml_train_predict_seconds", 0.09}};
    }
    if (id == "sin-superres") return {{"fine", "rmse", 0.01331}, {"fine", "mae", 0.00562}};
    if (id == "ns-superres") {
        return {{"fine", "rmse", 0.02184},           {"fine", "mae", 0.01438},
                {"timing", "fine_sim_seconds", 928.0}, {"timing", "coarse_sim_seconds", 14.29},
                {"timing", "forest_seconds", 0.42},    {"timing", "speedup", 63.0}};
    }
    return {};
}

ExperimentReport make_interpolation_report(const std::string& id, const SweepConfig& cfg,
                                           const InterpolationResult& result) {
    ExperimentReport r;
    r.experiment_id = id;
    r.seed = cfg.seed;
    r.config = sweep_config_to_json(cfg);
    for (const TestCase& tc : result.tests) {
        r.entries.push_back({label_for(cfg.problem, tc.parameter), tc.parameter, tc.metrics});
        for (const LinePrediction& lp : tc.lines) {
            r.entries.push_back({label_for(cfg.problem, tc.parameter) + "/" + lp.line_id, tc.parameter,
                                 compute_metrics(lp.predicted.values, lp.actual.values)});
        }
    }
    r.timing = {{"sim_seconds_per_run", result.sim_seconds_per_run},
                {"ml_train_predict_seconds", result.ml_train_predict_seconds}};
    r.paper_reference_values = published_reference_values(id);
    r.timestamp = utc_timestamp();
    return r;
}

ExperimentReport make_superres_report(const std::string& id, const SuperResConfig& cfg, const SuperResResult& result) {
    ExperimentReport r;
    r.experiment_id = id;
    r.seed = cfg.seed;
    r.config = superres_config_to_json(cfg);
    r.entries.push_back({"fine", std::nullopt, result.metrics});
    r.timing = {{"forest_seconds", result.forest_seconds}};
    if (cfg.source == SuperResSource::NavierStokes) {
        r.timing["fine_sim_seconds"] = result.fine_sim_seconds;
        r.timing["coarse_sim_seconds"] = result.coarse_sim_seconds;
        if (result.speedup) r.timing["speedup"] = *result.speedup;
    }
    r.paper_reference_values = published_reference_values(id);
    r.timestamp = utc_timestamp();
    return r;
}

void write_interpolation_outputs(const InterpolationResult& result, const std::filesystem::path& dir) {
    CsvWriter csv;
    csv.header({"test_value", "line_id", "s", "x", "y", "actual", "predicted"});
    for (const TestCase& tc : result.tests) {
        for (const LinePrediction& lp : tc.lines) {
            for (std::size_t k = 0; k < lp.actual.s.size(); ++k) {
                const Point p = lp.actual.point(k);
                csv.row_cells({format_double(tc.parameter), lp.line_id, format_double(lp.actual.s[k]),
                               format_double(p.x), format_double(p.y), format_double(lp.actual.values[k]),
                               format_double(lp.predicted.values[k])});
            }
        }
    }
    csv.commit(dir / "lines.csv");
}

void write_superres_outputs(const SuperResResult& result, const std::filesystem::path& dir) {
    write_field_csv(result.actual_fine, dir / "actual_fine.csv");
    write_field_csv(result.predicted_fine, dir / "predicted_fine.csv");
}

void write_report_bundle(const ExperimentReport& report, const std::filesystem::path& dir) {
    write_report(report, dir / "report.json");
    write_file_atomic(dir / "comparison.txt", comparison_table_text(report));
    write_file_atomic(dir / "comparison.csv", comparison_table_csv(report));
}

ExperimentReport run_benchmark(std::string_view id, const BenchmarkOptions& opts, const std::filesystem::path& out_dir) {
    const auto sweeps = canonical_sweeps();
    const std::filesystem::path dir = out_dir.empty() ? out_dir : out_dir / std::string(id);
    auto interpolation = [&](SweepConfig cfg) {
        cfg.seed = opts.seed;
        const InterpolationResult res = run_interpolation(cfg, opts.jobs);
        ExperimentReport rep = make_interpolation_report(std::string(id), cfg, res);
        if (!dir.empty()) {
            write_interpolation_outputs(res, dir);
            write_report_bundle(rep, dir);
        }
        return rep;
    };
    auto superres = [&](SuperResConfig cfg) {
        cfg.seed = opts.seed;
        const SuperResResult res = run_superres(cfg, opts.jobs);
        ExperimentReport rep = make_superres_report(std::string(id), cfg, res);
        if (!dir.empty()) {
            write_superres_outputs(res, dir);
            write_report_bundle(rep, dir);
        }
        return rep;
    };

    if (id == "ns") {
        SweepConfig cfg = sweeps[0];
        cfg.cavity.n = opts.ns_grid;
        return interpolation(cfg);
    }
    if (id == "stress") return interpolation(sweeps[1]);
    if (id == "em") return interpolation(sweeps[2]);
    if (id == "sin-superres") return superres(canonical_sin_superres());
    if (id == "ns-superres") return superres(canonical_ns_superres(opts.superres_coarse, opts.superres_fine));
    throw validation_error("unknown experiment '" + std::string(id) +
                           "' (expected ns, stress, em, sin-superres, ns-superres or all)");
}

}  // namespace psim
