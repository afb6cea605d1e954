/// @file psim_cli.cpp
/// @brief `psim` command-line tool. Talks to the library only through psim.h.

#include <psim/psim.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Stable process exit codes.
enum Exit { kOk = 0, kValidation = 1, kSolver = 2, kIo = 3, kAccuracy = 4 };

int exit_code(psim_status s) {
    switch (s) {
        case PSIM_OK: return kOk;
        case PSIM_ERR_SOLVER: return kSolver;
        case PSIM_ERR_IO:
        case PSIM_ERR_PARSE:
        case PSIM_ERR_SCHEMA: return kIo;
        case PSIM_ERR_ACCURACY: return kAccuracy;
        default: return kValidation;
    }
}

/// Thrown to unwind with a status already reported by the library.
struct Failure {
    int code;
};

void check(psim_status s) {
    if (s != PSIM_OK) {
        std::cerr << "error: " << psim_last_error() << "\n";
        throw Failure{exit_code(s)};
    }
}

[[noreturn]] void fail(int code, const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    throw Failure{code};
}

template <class F>
std::string read_string(F&& call) {
    size_t needed = 0;
    check(call(nullptr, 0, &needed));
    std::string s(needed + 1, '\0');
    check(call(s.data(), s.size(), &needed));
    s.resize(needed);
    return s;
}

std::string table_text(const psim_report* r) {
    return read_string([&](char* b, size_t c, size_t* n) { return psim_report_table_text(r, b, c, n); });
}

std::string default_config(const std::string& problem) {
    return read_string([&](char* b, size_t c, size_t* n) { return psim_default_config_json(problem.c_str(), b, c, n); });
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kIo, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(kIo, what + " is not valid JSON: " + e.what());
    }
}

struct ReportHandle {
    psim_report* p = nullptr;
    ~ReportHandle() { psim_report_destroy(p); }
};

int default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

fs::path default_data_dir() {
    if (const char* env = std::getenv("PSIM_DATA_DIR")) return env;
    return PSIM_DEFAULT_DATA_DIR;
}

// ---- simulate -------------------------------------------------------------

struct SimulateOpts {
    double re = 100.0;
    int grid = 0;
    double steady_tol = 1e-6;
    long max_steps = 2'000'000;
    double tension = 0.0;
    double hole_radius = 0.5;
    double half_width = 2.0;
    int points = 100;
    double psi0 = 1.0;
    std::string out;
};

void add_simulate(CLI::App& app, SimulateOpts& o) {
    auto* sim = app.add_subcommand("simulate", "Run one solve and write field/line CSVs and a JSON summary");
    sim->require_subcommand(1);

    auto* ns = sim->add_subcommand("ns", "Lid-driven cavity");
    ns->add_option("--re", o.re, "Reynolds number")->check(CLI::PositiveNumber)->capture_default_str();
    ns->add_option("--grid", o.grid, "Nodes per side (odd, default 129)");
    ns->add_option("--steady-tol", o.steady_tol, "Steady-state tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    ns->add_option("--max-steps", o.max_steps, "Step limit")->check(CLI::PositiveNumber)->capture_default_str();
    ns->add_option("--out", o.out, "Output directory")->required();
    ns->callback([&o] {
        psim_cavity_config cfg = psim_cavity_config_default();
        cfg.re = o.re;
        if (o.grid) cfg.n = o.grid;
        cfg.steady_tol = o.steady_tol;
        cfg.max_steps = o.max_steps;
        psim_cavity* sol = nullptr;
        check(psim_cavity_solve(&cfg, &sol));
        std::unique_ptr<psim_cavity, decltype(&psim_cavity_destroy)> guard(sol, psim_cavity_destroy);
        check(psim_cavity_write_outputs(sol, 65, o.out.c_str()));
        long steps = 0;
        int conv = 0;
        double secs = 0;
        check(psim_cavity_info(sol, &steps, &conv, &secs));
        std::cout << "cavity Re=" << o.re << " n=" << cfg.n << ": " << steps << " steps, "
                  << (conv ? "converged" : "not converged") << ", " << secs << " s\n";
    });

    auto* st = sim->add_subcommand("stress", "Plate with a circular hole (closed form)");
    st->add_option("--tension", o.tension, "Far-field tension [Pa]")->capture_default_str();
    st->add_option("--hole-radius", o.hole_radius, "Hole radius [m]")->check(CLI::PositiveNumber)->capture_default_str();
    st->add_option("--half-width", o.half_width, "Sampled quarter-plate extent [m]")->check(CLI::PositiveNumber)->capture_default_str();
    st->add_option("--points", o.points, "Points per sample line")->check(CLI::Range(2, 1000000))->capture_default_str();
    st->add_option("--grid", o.grid, "Raster nodes per side (default 101)");
    st->add_option("--out", o.out, "Output directory")->required();
    st->callback([&o] {
        psim_plate_config cfg = psim_plate_config_default();
        cfg.tension = o.tension;
        cfg.hole_radius = o.hole_radius;
        cfg.plate_half_width = o.half_width;
        check(psim_plate_write_outputs(&cfg, o.points, o.grid ? o.grid : 101, o.out.c_str()));
        std::cout << "plate T=" << o.tension << ": wrote " << o.out << "\n";
    });

    auto* em = sim->add_subcommand("em", "Magnetic scalar potential around a rectangular magnet");
    em->add_option("--psi0", o.psi0, "Pole-face potential")->capture_default_str();
    em->add_option("--grid", o.grid, "Nodes per side over [-2, 2]^2 (default 129)");
    em->add_option("--out", o.out, "Output directory")->required();
    em->callback([&o] {
        psim_magnet_config cfg = psim_magnet_config_default();
        cfg.psi0 = o.psi0;
        if (o.grid) cfg.n = o.grid;
        psim_magnet* sol = nullptr;
        check(psim_magnet_solve(&cfg, &sol));
        std::unique_ptr<psim_magnet, decltype(&psim_magnet_destroy)> guard(sol, psim_magnet_destroy);
        check(psim_magnet_write_outputs(sol, o.out.c_str()));
        int iters = 0, conv = 0;
        double secs = 0;
        check(psim_magnet_info(sol, &iters, &conv, &secs));
        std::cout << "magnet psi0=" << o.psi0 << ": " << iters << " sweeps, " << (conv ? "converged" : "not converged")
                  << ", " << secs << " s\n";
    });
}

// ---- sweep / superres -----------------------------------------------------

struct ExperimentOpts {
    std::string problem = "ns";
    std::string source = "sin";
    std::string config;
    std::vector<double> values, test;
    int grid = 0;
    int coarse = 0, fine = 0;
    double re = 0.0;
    int trees = 0;
    std::optional<std::uint64_t> seed;
    int jobs = default_jobs();
    std::string out;
    bool print_config = false;
};

void apply_common(json& cfg, const ExperimentOpts& o) {
    if (o.trees) cfg["forest"]["n_trees"] = o.trees;
    if (o.seed) cfg["seed"] = *o.seed;
}

void finish_experiment(psim_report* rep) { std::cout << table_text(rep); }

void add_sweep(CLI::App& app, ExperimentOpts& o) {
    auto* sw = app.add_subcommand("sweep", "Parameter-interpolation experiment");
    sw->add_option("--problem", o.problem, "ns, stress or em")
        ->check(CLI::IsMember({"ns", "navier_stokes", "stress", "em", "electromagnetic"}))
        ->capture_default_str();
    sw->add_option("--config", o.config, "JSON config (flags below override it)")->check(CLI::ExistingFile);
    sw->add_option("--values", o.values, "Parameter values, increasing")->delimiter(',');
    sw->add_option("--test", o.test, "Held-out values (subset of --values)")->delimiter(',');
    sw->add_option("--grid", o.grid, "Cavity nodes per side (ns only)");
    sw->add_option("--trees", o.trees, "Trees per forest")->check(CLI::PositiveNumber);
    sw->add_option("--seed", o.seed, "Forest seed");
    sw->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sw->add_option("--out", o.out, "Output directory for lines.csv and the report");
    sw->add_flag("--print-config", o.print_config, "Print the resolved config and exit");
    sw->callback([&o] {
        json cfg = o.config.empty() ? parse_json(default_config(o.problem), "default config")
                                    : parse_json(read_text_file(o.config), o.config);
        if (o.config.empty() || !cfg.contains("problem")) cfg["problem"] = o.problem;
        if (!o.values.empty()) cfg["parameter_values"] = o.values;
        if (!o.test.empty()) cfg["test_values"] = o.test;
        if (o.grid) cfg["cavity"]["n"] = o.grid;
        apply_common(cfg, o);
        if (o.print_config) {
            std::cout << cfg.dump(2) << "\n";
            return;
        }
        ReportHandle rep;
        check(psim_sweep_run_json(cfg.dump().c_str(), o.jobs, o.out.empty() ? nullptr : o.out.c_str(), &rep.p));
        finish_experiment(rep.p);
    });
}

void add_superres(CLI::App& app, ExperimentOpts& o) {
    auto* sr = app.add_subcommand("superres", "Coarse-to-fine super-resolution experiment");
    sr->add_option("--source", o.source, "sin or ns")->check(CLI::IsMember({"sin", "sin_xy", "ns", "navier_stokes"}))
        ->capture_default_str();
    sr->add_option("--config", o.config, "JSON config (flags below override it)")->check(CLI::ExistingFile);
    sr->add_option("--coarse", o.coarse, "Coarse nodes per side (ns only)");
    sr->add_option("--fine", o.fine, "Fine nodes per side (ns only)");
    sr->add_option("--re", o.re, "Base Reynolds number (ns only)")->check(CLI::PositiveNumber);
    sr->add_option("--trees", o.trees, "Trees in the forest")->check(CLI::PositiveNumber);
    sr->add_option("--seed", o.seed, "Forest seed");
    sr->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sr->add_option("--out", o.out, "Output directory for the fine fields and the report");
    sr->add_flag("--print-config", o.print_config, "Print the resolved config and exit");
    sr->callback([&o] {
        const bool ns = o.source == "ns" || o.source == "navier_stokes";
        json cfg = o.config.empty() ? parse_json(default_config(ns ? "ns-superres" : "sin"), "default config")
                                    : parse_json(read_text_file(o.config), o.config);
        if (o.coarse) cfg["coarse"]["nx"] = cfg["coarse"]["ny"] = o.coarse;
        if (o.fine) cfg["fine"]["nx"] = cfg["fine"]["ny"] = o.fine;
        if (o.re > 0) cfg["base_re"] = o.re;
        apply_common(cfg, o);
        if (o.print_config) {
            std::cout << cfg.dump(2) << "\n";
            return;
        }
        ReportHandle rep;
        check(psim_superres_run_json(cfg.dump().c_str(), o.jobs, o.out.empty() ? nullptr : o.out.c_str(), &rep.p));
        finish_experiment(rep.p);
    });
}

// ---- train / predict ------------------------------------------------------

struct TrainOpts {
    std::string data, target, out, model;
    std::vector<std::string> features;
    psim_forest_params params = psim_forest_params_default();
    bool bootstrap = false;
    std::uint64_t seed = 42;
    int jobs = default_jobs();
};

void add_train_predict(CLI::App& app, TrainOpts& o) {
    auto* tr = app.add_subcommand("train", "Fit a forest on CSV columns and save it as JSON");
    tr->add_option("--data", o.data, "Training CSV with a header row")->required();
    tr->add_option("--features", o.features, "Feature columns")->required()->delimiter(',');
    tr->add_option("--target", o.target, "Target column")->required();
    tr->add_option("--trees", o.params.n_trees, "Number of trees")->check(CLI::PositiveNumber)->capture_default_str();
    tr->add_option("--max-depth", o.params.max_depth, "Depth limit (0 = none)")->check(CLI::NonNegativeNumber);
    tr->add_option("--min-samples-leaf", o.params.min_samples_leaf)->check(CLI::PositiveNumber)->capture_default_str();
    tr->add_option("--min-samples-split", o.params.min_samples_split)->check(CLI::Range(2, 1 << 30))->capture_default_str();
    tr->add_flag("--bootstrap", o.bootstrap, "Resample rows per tree");
    tr->add_option("--seed", o.seed, "Seed")->capture_default_str();
    tr->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    tr->add_option("--out", o.out, "Model JSON path")->required();
    tr->callback([&o] {
        std::vector<const char*> names;
        for (const auto& f : o.features) names.push_back(f.c_str());
        psim_dataset* ds = nullptr;
        check(psim_dataset_read_csv(o.data.c_str(), names.data(), names.size(), o.target.c_str(), &ds));
        std::unique_ptr<psim_dataset, decltype(&psim_dataset_destroy)> dguard(ds, psim_dataset_destroy);
        o.params.bootstrap = o.bootstrap ? 1 : 0;
        psim_forest* forest = nullptr;
        check(psim_forest_fit(ds, &o.params, o.seed, o.jobs, &forest));
        std::unique_ptr<psim_forest, decltype(&psim_forest_destroy)> fguard(forest, psim_forest_destroy);
        check(psim_forest_save(forest, o.out.c_str()));
        size_t rows = 0;
        check(psim_dataset_rows(ds, &rows));
        std::cout << "trained " << o.params.n_trees << " trees on " << rows << " rows -> " << o.out << "\n";
    });

    auto* pr = app.add_subcommand("predict", "Append a prediction column to a CSV");
    pr->add_option("--model", o.model, "Model JSON")->required();
    pr->add_option("--data", o.data, "Input CSV containing the model's feature columns")->required();
    pr->add_option("--out", o.out, "Output CSV")->required();
    pr->callback([&o] {
        psim_forest* forest = nullptr;
        check(psim_forest_load(o.model.c_str(), &forest));
        std::unique_ptr<psim_forest, decltype(&psim_forest_destroy)> guard(forest, psim_forest_destroy);
        check(psim_forest_predict_csv(forest, o.data.c_str(), o.out.c_str()));
    });
}

// ---- benchmark ------------------------------------------------------------

struct BenchOpts {
    std::string experiment = "all";
    std::uint64_t seed = 42;
    int jobs = default_jobs();
    std::string out = "results";
    bool fast = false;
    int ns_grid = 0;
};

void add_benchmark(CLI::App& app, BenchOpts& o) {
    auto* b = app.add_subcommand("benchmark", "Run the canonical experiments and compare with published values");
    b->add_option("--experiment", o.experiment, "ns, stress, em, sin-superres, ns-superres or all")
        ->check(CLI::IsMember({"ns", "stress", "em", "sin-superres", "ns-superres", "all"}))
        ->capture_default_str();
    b->add_option("--seed", o.seed, "Forest seed")->capture_default_str();
    b->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    b->add_option("--out", o.out, "Output directory; each experiment writes <out>/<id>/")->capture_default_str();
    b->add_flag("--fast", o.fast, "Reduced grids: 65 for the ns sweep, 33 -> 129 for ns-superres");
    b->add_option("--ns-grid", o.ns_grid, "Cavity grid for the ns sweep (overrides --fast)");
    b->callback([&o] {
        psim_benchmark_options opts = psim_benchmark_options_default(o.fast ? 1 : 0);
        opts.seed = o.seed;
        opts.jobs = o.jobs;
        if (o.ns_grid) opts.ns_grid = o.ns_grid;
        std::vector<std::string> ids;
        if (o.experiment == "all") ids = {"ns", "stress", "em", "sin-superres", "ns-superres"};
        else ids = {o.experiment};
        for (const auto& id : ids) {
            ReportHandle rep;
            check(psim_benchmark_run(id.c_str(), &opts, o.out.c_str(), &rep.p));
            std::cout << "== " << id << " (" << (fs::path(o.out) / id / "report.json").string() << ")\n"
                      << table_text(rep.p) << "\n";
        }
    });
}

// ---- validate-ghia --------------------------------------------------------

struct GhiaOpts {
    double re = 100.0;
    int grid = 129;
    std::string reference;
    std::string profile = "auto";
    double tol = 0.02;
    double steady_tol = 1e-6;
};

void add_validate(CLI::App& app, GhiaOpts& o) {
    auto* v = app.add_subcommand("validate-ghia", "Compare a cavity solve with a published centreline profile");
    v->add_option("--re", o.re, "Reynolds number")->check(CLI::PositiveNumber)->capture_default_str();
    v->add_option("--grid", o.grid, "Nodes per side (odd)")->capture_default_str();
    v->add_option("--reference", o.reference,
                  "station,value CSV (default: re<Re>_u_vertical.csv in the bundled data directory)");
    v->add_option("--profile", o.profile, "u_vertical, v_horizontal or auto (from the file name)")
        ->check(CLI::IsMember({"auto", "u_vertical", "v_horizontal"}))
        ->capture_default_str();
    v->add_option("--tol", o.tol, "Maximum RMSE")->check(CLI::NonNegativeNumber)->capture_default_str();
    v->add_option("--steady-tol", o.steady_tol, "Steady-state tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    v->callback([&o] {
        fs::path ref = o.reference;
        if (ref.empty()) {
            std::ostringstream name;
            name << "re" << o.re << "_u_vertical.csv";
            ref = default_data_dir() / "ghia" / name.str();
        }
        if (!fs::is_regular_file(ref)) fail(kIo, "reference fixture '" + ref.string() + "' not found");
        std::string profile = o.profile;
        if (profile == "auto") {
            profile = ref.filename().string().find("v_horizontal") != std::string::npos ? "v_horizontal" : "u_vertical";
        }
        psim_cavity_config cfg = psim_cavity_config_default();
        cfg.re = o.re;
        cfg.n = o.grid;
        cfg.steady_tol = o.steady_tol;
        psim_cavity* sol = nullptr;
        check(psim_cavity_solve(&cfg, &sol));
        std::unique_ptr<psim_cavity, decltype(&psim_cavity_destroy)> guard(sol, psim_cavity_destroy);
        double rmse = 0, mae = 0;
        check(psim_cavity_compare_reference(sol, profile.c_str(), ref.string().c_str(), &rmse, &mae));
        std::cout << profile << " vs " << ref.string() << ": RMSE " << rmse << " MAE " << mae << " (tol " << o.tol
                  << ")\n";
        if (!(rmse <= o.tol)) fail(kAccuracy, "RMSE exceeds tolerance");
        std::cout << "PASS\n";
    });
}

// ---- report ---------------------------------------------------------------

struct ReportOpts {
    std::vector<std::string> inputs;
    std::string format = "text";
};

void add_report(CLI::App& app, ReportOpts& o) {
    auto* r = app.add_subcommand("report", "Print comparison tables for saved report JSON files");
    r->add_option("reports", o.inputs, "report.json files")->required();
    r->add_option("--format", o.format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}))
        ->capture_default_str();
    r->callback([&o] {
        for (const auto& path : o.inputs) {
            ReportHandle rep;
            check(psim_report_read(path.c_str(), &rep.p));
            if (o.format == "csv") {
                std::cout << read_string([&](char* b, size_t c, size_t* n) { return psim_report_table_csv(rep.p, b, c, n); });
            } else if (o.format == "json") {
                std::cout << read_string([&](char* b, size_t c, size_t* n) { return psim_report_json(rep.p, b, c, n); });
            } else {
                std::cout << "== " << path << "\n" << table_text(rep.p) << "\n";
            }
        }
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Physics simulations and random-forest surrogates"};
    app.require_subcommand(1);
    app.set_version_flag("--version", psim_version());

    SimulateOpts sim;
    ExperimentOpts sweep, superres;
    TrainOpts train;
    BenchOpts bench;
    GhiaOpts ghia;
    ReportOpts report;
    add_simulate(app, sim);
    add_sweep(app, sweep);
    add_superres(app, superres);
    add_train_predict(app, train);
    add_benchmark(app, bench);
    add_validate(app, ghia);
    add_report(app, report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    } catch (const Failure& f) {
        return f.code;
    }
    return kOk;
}
