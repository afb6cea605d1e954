/// @file psim_capi.cpp
/// @brief extern "C" wrappers over the core library.

#include "psim/psim.h"

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "cavity.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "forest.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "magnet.hpp"
#include "plate.hpp"
#include "report.hpp"
#include "surrogate.hpp"

struct psim_field {
    psim::ScalarField2D f;
};

struct psim_cavity {
    psim::CavityConfig cfg;
    psim::CavitySolution sol;
    psim_field u, v;
};

struct psim_magnet {
    psim::MagnetConfig cfg;
    psim::MagnetSolution sol;
    psim_field psi, h_mag;
};

struct psim_dataset {
    psim::RegressionDataset ds;
};

struct psim_forest {
    psim::ForestModel model;
};

struct psim_report {
    psim::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;

psim_status status_for(psim::ErrorKind kind) {
    switch (kind) {
        case psim::ErrorKind::Validation: return PSIM_ERR_VALIDATION;
        case psim::ErrorKind::OutOfDomain: return PSIM_ERR_OUT_OF_DOMAIN;
        case psim::ErrorKind::SolverDiverged: return PSIM_ERR_SOLVER;
        case psim::ErrorKind::Io: return PSIM_ERR_IO;
        case psim::ErrorKind::Parse: return PSIM_ERR_PARSE;
        case psim::ErrorKind::SchemaMismatch: return PSIM_ERR_SCHEMA;
        case psim::ErrorKind::Accuracy: return PSIM_ERR_ACCURACY;
    }
    return PSIM_ERR_INTERNAL;
}

template <class F>
psim_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return PSIM_OK;
    } catch (const psim::Error& e) {
        g_last_error = e.what();
        return status_for(e.kind());
    } catch (const nlohmann::json::exception& e) {
        g_last_error = std::string("JSON error: ") + e.what();
        return PSIM_ERR_PARSE;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return PSIM_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PSIM_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return PSIM_ERR_INTERNAL;
    }
}

template <class T>
void require(const T* p, const char* name) {
    if (p == nullptr) throw psim::validation_error(std::string(name) + " must not be NULL");
}

void copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
    if (needed) *needed = s.size();
    if (buf && cap > 0) {
        const size_t n = std::min(cap - 1, s.size());
        std::memcpy(buf, s.data(), n);
        buf[n] = '\0';
    }
}

std::vector<std::string> names_from(const char* const* names, size_t n) {
    require(names, "feature_names");
    std::vector<std::string> out;
    for (size_t k = 0; k < n; ++k) {
        require(names[k], "feature name");
        out.emplace_back(names[k]);
    }
    return out;
}

psim::CavityConfig to_core(const psim_cavity_config& c) {
    psim::CavityConfig cfg;
    cfg.re = c.re;
    cfg.n = c.n;
    if (c.dt > 0.0) cfg.dt = c.dt;
    cfg.steady_tol = c.steady_tol;
    cfg.max_steps = c.max_steps;
    if (c.poisson_tol > 0.0) cfg.poisson_tol = c.poisson_tol;
    cfg.poisson_max_iters = c.poisson_max_iters;
    return cfg;
}

psim::PlateConfig to_core(const psim_plate_config& c) { return {c.tension, c.hole_radius, c.plate_half_width}; }

psim::MagnetConfig to_core(const psim_magnet_config& c) {
    psim::MagnetConfig cfg;
    cfg.psi0 = c.psi0;
    cfg.domain = psim::GridSpec::square(c.n, -2.0, 2.0);
    cfg.solver_tol = c.solver_tol;
    cfg.max_iters = c.max_iters;
    return cfg;
}

psim::ForestHyperparams to_core(const psim_forest_params& p) {
    psim::ForestHyperparams hp;
    hp.n_trees = p.n_trees;
    if (p.max_depth > 0) hp.max_depth = p.max_depth;
    hp.min_samples_leaf = p.min_samples_leaf;
    hp.min_samples_split = p.min_samples_split;
    hp.bootstrap = p.bootstrap != 0;
    return hp;
}

std::filesystem::path opt_path(const char* p) { return p ? std::filesystem::path(p) : std::filesystem::path(); }

}  // namespace

extern "C" {

const char* psim_last_error(void) { return g_last_error.c_str(); }

const char* psim_status_name(psim_status status) {
    switch (status) {
        case PSIM_OK: return "ok";
        case PSIM_ERR_VALIDATION: return "validation error";
        case PSIM_ERR_SOLVER: return "solver diverged";
        case PSIM_ERR_IO: return "I/O error";
        case PSIM_ERR_ACCURACY: return "accuracy check failed";
        case PSIM_ERR_PARSE: return "parse error";
        case PSIM_ERR_SCHEMA: return "schema mismatch";
        case PSIM_ERR_OUT_OF_DOMAIN: return "out of domain";
        case PSIM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* psim_version(void) { return "1.0.0"; }

/* fields */

psim_status psim_field_create(int nx, int ny, double x_min, double x_max, double y_min, double y_max, psim_field** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        psim::GridSpec spec{nx, ny, x_min, x_max, y_min, y_max};
        *out = new psim_field{psim::make_grid(spec)};
    });
}

void psim_field_destroy(psim_field* field) { delete field; }

psim_status psim_field_shape(const psim_field* field, int* nx, int* ny) {
    return guarded([&] {
        require(field, "field");
        if (nx) *nx = field->f.spec().nx;
        if (ny) *ny = field->f.spec().ny;
    });
}

psim_status psim_field_values(psim_field* field, double** values) {
    return guarded([&] {
        require(field, "field");
        require(values, "values");
        *values = field->f.values().data();
    });
}

psim_status psim_field_bilinear(const psim_field* field, double x, double y, double* out) {
    return guarded([&] {
        require(field, "field");
        require(out, "out");
        *out = psim::bilinear_at(field->f, x, y);
    });
}

psim_status psim_field_write_csv(const psim_field* field, const char* path) {
    return guarded([&] {
        require(field, "field");
        require(path, "path");
        psim::write_field_csv(field->f, path);
    });
}

/* cavity */

psim_cavity_config psim_cavity_config_default(void) {
    const psim::CavityConfig d;
    return {d.re, d.n, 0.0, d.steady_tol, d.max_steps, 0.0, d.poisson_max_iters};
}

psim_status psim_cavity_solve(const psim_cavity_config* cfg, psim_cavity** out) {
    return guarded([&] {
        require(cfg, "cfg");
        require(out, "out");
        *out = nullptr;
        auto c = std::make_unique<psim_cavity>();
        c->cfg = to_core(*cfg);
        c->sol = psim::solve_cavity(c->cfg);
        c->u.f = c->sol.u;
        c->v.f = c->sol.v;
        *out = c.release();
    });
}

void psim_cavity_destroy(psim_cavity* sol) { delete sol; }

psim_status psim_cavity_info(const psim_cavity* sol, long* steps, int* converged, double* wall_seconds) {
    return guarded([&] {
        require(sol, "sol");
        if (steps) *steps = sol->sol.steps_taken;
        if (converged) *converged = sol->sol.converged ? 1 : 0;
        if (wall_seconds) *wall_seconds = sol->sol.wall_time_s;
    });
}

psim_status psim_cavity_fields(const psim_cavity* sol, const psim_field** u, const psim_field** v) {
    return guarded([&] {
        require(sol, "sol");
        if (u) *u = &sol->u;
        if (v) *v = &sol->v;
    });
}

psim_status psim_cavity_write_outputs(const psim_cavity* sol, int centerline_points, const char* dir) {
    return guarded([&] {
        require(sol, "sol");
        require(dir, "dir");
        const std::filesystem::path d(dir);
        const auto& s = sol->sol;
        psim::write_field_csv(s.u, d / "u.csv");
        psim::write_field_csv(s.v, d / "v.csv");
        const psim::CenterlineProfiles prof = psim::centerline_profiles(s, centerline_points);
        psim::CsvWriter csv;
        csv.header({"line_id", "s", "x", "y", "value"});
        for (const auto* line : {&prof.u_vertical, &prof.v_horizontal}) {
            const char* id = line == &prof.u_vertical ? "u_vertical" : "v_horizontal";
            for (std::size_t k = 0; k < line->s.size(); ++k) {
                const psim::Point p = line->point(k);
                csv.row_cells({id, psim::format_double(line->s[k]), psim::format_double(p.x),
                               psim::format_double(p.y), psim::format_double(line->values[k])});
            }
        }
        csv.commit(d / "centerlines.csv");
        const nlohmann::json summary = {{"problem", "navier_stokes"},
                                        {"re", sol->cfg.re},
                                        {"n", sol->cfg.n},
                                        {"dt", sol->cfg.time_step()},
                                        {"steady_tol", sol->cfg.steady_tol},
                                        {"poisson_tol", sol->cfg.pressure_tol()},
                                        {"steps_taken", s.steps_taken},
                                        {"converged", s.converged},
                                        {"final_change", s.residual_history.empty() ? 0.0 : s.residual_history.back()},
                                        {"max_divergence", psim::max_central_divergence(s.u, s.v)},
                                        {"wall_time_s", s.wall_time_s}};
        psim::write_file_atomic(d / "summary.json", summary.dump(2) + "\n");
    });
}

psim_status psim_cavity_compare_reference(const psim_cavity* sol, const char* profile, const char* reference_csv,
                                          double* rmse, double* mae) {
    return guarded([&] {
        require(sol, "sol");
        require(profile, "profile");
        require(reference_csv, "reference_csv");
        const psim::CenterlineProfiles prof = psim::centerline_profiles(sol->sol);
        const std::string which(profile);
        const psim::SampleLine* line = nullptr;
        if (which == "u_vertical") line = &prof.u_vertical;
        else if (which == "v_horizontal") line = &prof.v_horizontal;
        else throw psim::validation_error("unknown profile '" + which + "' (expected u_vertical or v_horizontal)");
        const psim::Metrics m = psim::validate_against_reference(*line, std::filesystem::path(reference_csv));
        if (rmse) *rmse = m.rmse;
        if (mae) *mae = m.mae;
    });
}

/* plate */

psim_plate_config psim_plate_config_default(void) {
    const psim::PlateConfig d;
    return {d.tension, d.hole_radius, d.plate_half_width};
}

psim_status psim_plate_sigma_xx(const psim_plate_config* cfg, double x, double y, double* out) {
    return guarded([&] {
        require(cfg, "cfg");
        require(out, "out");
        *out = psim::sigma_xx_at(to_core(*cfg), x, y);
    });
}

psim_status psim_plate_write_outputs(const psim_plate_config* cfg, int line_points, int grid_n, const char* dir) {
    return guarded([&] {
        require(cfg, "cfg");
        require(dir, "dir");
        const psim::PlateConfig pc = to_core(*cfg);
        const std::filesystem::path d(dir);
        const auto lines = psim::sample_plate_lines(pc, line_points);
        psim::CsvWriter csv;
        csv.header({"line_id", "s", "x", "y", "sigma_xx"});
        for (std::size_t l = 0; l < lines.size(); ++l) {
            for (std::size_t k = 0; k < lines[l].s.size(); ++k) {
                const psim::Point p = lines[l].point(k);
                csv.row_cells({std::string(psim::kPlateLineIds[l]), psim::format_double(lines[l].s[k]),
                               psim::format_double(p.x), psim::format_double(p.y),
                               psim::format_double(lines[l].values[k])});
            }
        }
        csv.commit(d / "lines.csv");
        const psim::PlateRaster raster =
            psim::rasterize_plate(pc, psim::GridSpec::square(grid_n, 0.0, pc.plate_half_width));
        psim::write_field_csv(raster.sigma_xx, d / "sigma_xx.csv", raster.in_hole);
        const nlohmann::json summary = {{"problem", "stress"},
                                        {"tension", pc.tension},
                                        {"hole_radius", pc.hole_radius},
                                        {"plate_half_width", pc.plate_half_width},
                                        {"line_points", line_points},
                                        {"grid_n", grid_n},
                                        {"max_sigma_xx", psim::sigma_xx_at(pc, 0.0, pc.hole_radius)}};
        psim::write_file_atomic(d / "summary.json", summary.dump(2) + "\n");
    });
}

/* magnet */

psim_magnet_config psim_magnet_config_default(void) {
    const psim::MagnetConfig d;
    return {d.psi0, d.domain.nx, d.solver_tol, d.max_iters};
}

psim_status psim_magnet_solve(const psim_magnet_config* cfg, psim_magnet** out) {
    return guarded([&] {
        require(cfg, "cfg");
        require(out, "out");
        *out = nullptr;
        auto m = std::make_unique<psim_magnet>();
        m->cfg = to_core(*cfg);
        m->sol = psim::solve_magnet(m->cfg);
        m->psi.f = m->sol.psi;
        m->h_mag.f = m->sol.h_mag;
        *out = m.release();
    });
}

void psim_magnet_destroy(psim_magnet* sol) { delete sol; }

psim_status psim_magnet_info(const psim_magnet* sol, int* iters, int* converged, double* wall_seconds) {
    return guarded([&] {
        require(sol, "sol");
        if (iters) *iters = sol->sol.iters;
        if (converged) *converged = sol->sol.converged ? 1 : 0;
        if (wall_seconds) *wall_seconds = sol->sol.wall_time_s;
    });
}

psim_status psim_magnet_fields(const psim_magnet* sol, const psim_field** psi, const psim_field** h_mag) {
    return guarded([&] {
        require(sol, "sol");
        if (psi) *psi = &sol->psi;
        if (h_mag) *h_mag = &sol->h_mag;
    });
}

psim_status psim_magnet_write_outputs(const psim_magnet* sol, const char* dir) {
    return guarded([&] {
        require(sol, "sol");
        require(dir, "dir");
        const std::filesystem::path d(dir);
        psim::write_field_csv(sol->sol.psi, d / "psi.csv", sol->sol.frozen);
        psim::write_field_csv(sol->sol.h_mag, d / "h_mag.csv");
        const psim::SampleLine line = psim::sample_field_line(sol->sol, psim::default_field_line());
        psim::CsvWriter csv;
        csv.header({"s", "x", "y", "h_mag"});
        for (std::size_t k = 0; k < line.s.size(); ++k) {
            const psim::Point p = line.point(k);
            csv.row({line.s[k], p.x, p.y, line.values[k]});
        }
        csv.commit(d / "line.csv");
        const nlohmann::json summary = {{"problem", "electromagnetic"},
                                        {"psi0", sol->cfg.psi0},
                                        {"n", sol->cfg.domain.nx},
                                        {"solver_tol", sol->cfg.solver_tol},
                                        {"iters", sol->sol.iters},
                                        {"converged", sol->sol.converged},
                                        {"wall_time_s", sol->sol.wall_time_s}};
        psim::write_file_atomic(d / "summary.json", summary.dump(2) + "\n");
    });
}

/* datasets and forests */

psim_forest_params psim_forest_params_default(void) {
    const psim::ForestHyperparams d;
    return {d.n_trees, d.max_depth.value_or(0), d.min_samples_leaf, d.min_samples_split, d.bootstrap ? 1 : 0};
}

psim_status psim_dataset_create(const char* const* feature_names, size_t n_features, psim_dataset** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        if (n_features == 0) throw psim::validation_error("a dataset needs at least one feature");
        *out = new psim_dataset{psim::RegressionDataset(names_from(feature_names, n_features))};
    });
}

psim_status psim_dataset_add_row(psim_dataset* ds, const double* features, double target) {
    return guarded([&] {
        require(ds, "ds");
        require(features, "features");
        ds->ds.add_row({features, ds->ds.n_features()}, target);
    });
}

psim_status psim_dataset_read_csv(const char* path, const char* const* feature_names, size_t n_features,
                                  const char* target_name, psim_dataset** out) {
    return guarded([&] {
        require(path, "path");
        require(target_name, "target_name");
        require(out, "out");
        *out = nullptr;
        if (n_features == 0) throw psim::validation_error("a dataset needs at least one feature");
        const auto names = names_from(feature_names, n_features);
        const psim::CsvTable table = psim::read_csv(path);
        std::vector<std::size_t> cols;
        for (const auto& n : names) cols.push_back(table.column(n));
        const std::size_t tcol = table.column(target_name);
        psim::RegressionDataset ds(names);
        std::vector<double> row(cols.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            for (std::size_t c = 0; c < cols.size(); ++c) row[c] = table.number(r, cols[c]);
            ds.add_row(row, table.number(r, tcol));
        }
        *out = new psim_dataset{std::move(ds)};
    });
}

void psim_dataset_destroy(psim_dataset* ds) { delete ds; }

psim_status psim_dataset_rows(const psim_dataset* ds, size_t* rows) {
    return guarded([&] {
        require(ds, "ds");
        require(rows, "rows");
        *rows = ds->ds.n_rows();
    });
}

psim_status psim_forest_fit(const psim_dataset* ds, const psim_forest_params* params, uint64_t seed, int jobs,
                            psim_forest** out) {
    return guarded([&] {
        require(ds, "ds");
        require(params, "params");
        require(out, "out");
        *out = nullptr;
        *out = new psim_forest{psim::fit(ds->ds, to_core(*params), seed, jobs)};
    });
}

void psim_forest_destroy(psim_forest* forest) { delete forest; }

psim_status psim_forest_n_features(const psim_forest* forest, size_t* n) {
    return guarded([&] {
        require(forest, "forest");
        require(n, "n");
        *n = forest->model.n_features();
    });
}

psim_status psim_forest_predict(const psim_forest* forest, const double* x, size_t n_rows, double* out) {
    return guarded([&] {
        require(forest, "forest");
        if (n_rows == 0) return;
        require(x, "x");
        require(out, "out");
        const auto pred = forest->model.predict_batch(std::span<const double>(x, n_rows * forest->model.n_features()));
        std::copy(pred.begin(), pred.end(), out);
    });
}

psim_status psim_forest_save(const psim_forest* forest, const char* path) {
    return guarded([&] {
        require(forest, "forest");
        require(path, "path");
        psim::save_model(forest->model, path);
    });
}

psim_status psim_forest_load(const char* path, psim_forest** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = nullptr;
        *out = new psim_forest{psim::load_model(path)};
    });
}

psim_status psim_forest_predict_csv(const psim_forest* forest, const char* in_csv, const char* out_csv) {
    return guarded([&] {
        require(forest, "forest");
        require(in_csv, "in_csv");
        require(out_csv, "out_csv");
        const psim::CsvTable table = psim::read_csv(in_csv);
        const auto& names = forest->model.feature_names;
        std::vector<std::size_t> cols;
        for (const auto& n : names) cols.push_back(table.column(n));
        std::vector<double> x(table.rows.size() * cols.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            for (std::size_t c = 0; c < cols.size(); ++c) x[r * cols.size() + c] = table.number(r, cols[c]);
        }
        const auto pred = forest->model.predict_batch(std::span<const double>(x));
        psim::CsvWriter csv;
        std::vector<std::string> header = table.header;
        header.push_back("prediction");
        csv.header(header);
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            std::vector<std::string> cells = table.rows[r];
            cells.push_back(psim::format_double(pred[r]));
            csv.row_cells(cells);
        }
        csv.commit(out_csv);
    });
}

/* experiments and reports */

psim_benchmark_options psim_benchmark_options_default(int fast) {
    const psim::BenchmarkOptions o = fast ? psim::BenchmarkOptions::fast() : psim::BenchmarkOptions{};
    return {o.seed, o.jobs, o.ns_grid, o.superres_coarse, o.superres_fine};
}

psim_status psim_benchmark_run(const char* id, const psim_benchmark_options* opts, const char* out_dir,
                               psim_report** out) {
    return guarded([&] {
        require(id, "id");
        require(opts, "opts");
        require(out, "out");
        *out = nullptr;
        psim::BenchmarkOptions o;
        o.seed = opts->seed;
        o.jobs = opts->jobs;
        o.ns_grid = opts->ns_grid;
        o.superres_coarse = opts->superres_coarse;
        o.superres_fine = opts->superres_fine;
        *out = new psim_report{psim::run_benchmark(id, o, opt_path(out_dir))};
    });
}

psim_status psim_sweep_run_json(const char* config_json, int jobs, const char* out_dir, psim_report** out) {
    return guarded([&] {
        require(config_json, "config_json");
        require(out, "out");
        *out = nullptr;
        const psim::SweepConfig cfg = psim::sweep_config_from_json(nlohmann::json::parse(config_json));
        const psim::InterpolationResult res = psim::run_interpolation(cfg, jobs);
        auto rep = std::make_unique<psim_report>();
        rep->report = psim::make_interpolation_report("sweep-" + std::string(psim::to_string(cfg.problem)), cfg, res);
        if (out_dir) {
            psim::write_interpolation_outputs(res, out_dir);
            psim::write_report_bundle(rep->report, out_dir);
        }
        *out = rep.release();
    });
}

psim_status psim_superres_run_json(const char* config_json, int jobs, const char* out_dir, psim_report** out) {
    return guarded([&] {
        require(config_json, "config_json");
        require(out, "out");
        *out = nullptr;
        const psim::SuperResConfig cfg = psim::superres_config_from_json(nlohmann::json::parse(config_json));
        const psim::SuperResResult res = psim::run_superres(cfg, jobs);
        auto rep = std::make_unique<psim_report>();
        rep->report = psim::make_superres_report("superres-" + std::string(psim::to_string(cfg.source)), cfg, res);
        if (out_dir) {
            psim::write_superres_outputs(res, out_dir);
            psim::write_report_bundle(rep->report, out_dir);
        }
        *out = rep.release();
    });
}

psim_status psim_default_config_json(const char* problem, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(problem, "problem");
        const std::string p(problem);
        nlohmann::json j;
        if (p == "sin") j = psim::superres_config_to_json(psim::canonical_sin_superres());
        else if (p == "ns-superres") j = psim::superres_config_to_json(psim::canonical_ns_superres());
        else j = psim::sweep_config_to_json(psim::canonical_sweeps()[static_cast<std::size_t>(psim::parse_problem(p))]);
        copy_out(j.dump(2) + "\n", buf, cap, needed);
    });
}

void psim_report_destroy(psim_report* report) { delete report; }

psim_status psim_report_read(const char* path, psim_report** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = nullptr;
        *out = new psim_report{psim::read_report(path)};
    });
}

psim_status psim_report_write(const psim_report* report, const char* path) {
    return guarded([&] {
        require(report, "report");
        require(path, "path");
        psim::write_report(report->report, path);
    });
}

psim_status psim_report_write_bundle(const psim_report* report, const char* dir) {
    return guarded([&] {
        require(report, "report");
        require(dir, "dir");
        psim::write_report_bundle(report->report, dir);
    });
}

psim_status psim_report_measured(const psim_report* report, const char* label, const char* metric, double* out) {
    return guarded([&] {
        require(report, "report");
        require(label, "label");
        require(metric, "metric");
        require(out, "out");
        const auto v = report->report.measured(label, metric);
        if (!v) throw psim::validation_error(std::string("report has no ") + metric + " for '" + label + "'");
        *out = *v;
    });
}

psim_status psim_report_table_text(const psim_report* report, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(report, "report");
        copy_out(psim::comparison_table_text(report->report), buf, cap, needed);
    });
}

psim_status psim_report_table_csv(const psim_report* report, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(report, "report");
        copy_out(psim::comparison_table_csv(report->report), buf, cap, needed);
    });
}

psim_status psim_report_json(const psim_report* report, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(report, "report");
        copy_out(psim::report_to_json(report->report).dump(2) + "\n", buf, cap, needed);
    });
}

}  // extern "C"
