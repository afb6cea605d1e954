/// @file test_capi.cpp
/// @brief The shared library's C interface: handles, status codes, buffers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <psim/psim.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Tmp {
    fs::path dir = fs::temp_directory_path() / ("psim_capi_" + std::to_string(::getpid()));
    Tmp() { fs::create_directories(dir); }
    ~Tmp() { fs::remove_all(dir); }
    std::string operator/(const char* name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("status names and version") {
    CHECK(std::string(psim_status_name(PSIM_OK)) == "ok");
    CHECK(std::string(psim_status_name(PSIM_ERR_IO)) == "I/O error");
    CHECK(std::string(psim_version()).size() > 0);
}

TEST_CASE("null arguments are validation errors with a message") {
    CHECK(psim_field_create(3, 3, 0, 1, 0, 1, nullptr) == PSIM_ERR_VALIDATION);
    CHECK(std::string(psim_last_error()).find("out") != std::string::npos);
    CHECK(psim_cavity_solve(nullptr, nullptr) == PSIM_ERR_VALIDATION);
    psim_field_destroy(nullptr);
    psim_cavity_destroy(nullptr);
    psim_forest_destroy(nullptr);
    psim_report_destroy(nullptr);
}

TEST_CASE("fields") {
    psim_field* f = nullptr;
    CHECK(psim_field_create(1, 3, 0, 1, 0, 1, &f) == PSIM_ERR_VALIDATION);
    CHECK(f == nullptr);
    REQUIRE(psim_field_create(3, 3, 0, 1, 0, 1, &f) == PSIM_OK);
    CHECK(std::string(psim_last_error()).empty());
    double* v = nullptr;
    REQUIRE(psim_field_values(f, &v) == PSIM_OK);
    for (int k = 0; k < 9; ++k) v[k] = (k % 3) * 0.5;  // f = x
    double out = 0;
    CHECK(psim_field_bilinear(f, 0.3, 0.9, &out) == PSIM_OK);
    CHECK(out == doctest::Approx(0.3));
    CHECK(psim_field_bilinear(f, 1.5, 0.5, &out) == PSIM_ERR_OUT_OF_DOMAIN);
    int nx = 0, ny = 0;
    CHECK(psim_field_shape(f, &nx, &ny) == PSIM_OK);
    CHECK(nx == 3);
    Tmp tmp;
    CHECK(psim_field_write_csv(f, (tmp / "f.csv").c_str()) == PSIM_OK);
    CHECK(fs::exists(tmp / "f.csv"));
    psim_field_destroy(f);
}

TEST_CASE("cavity through the C interface") {
    psim_cavity_config cfg = psim_cavity_config_default();
    CHECK(cfg.n == 129);
    cfg.n = 33;
    psim_cavity* sol = nullptr;
    REQUIRE(psim_cavity_solve(&cfg, &sol) == PSIM_OK);
    long steps = 0;
    int conv = 0;
    double secs = -1;
    CHECK(psim_cavity_info(sol, &steps, &conv, &secs) == PSIM_OK);
    CHECK(conv == 1);
    CHECK(steps > 0);
    CHECK(secs >= 0);
    const psim_field *u = nullptr, *v = nullptr;
    CHECK(psim_cavity_fields(sol, &u, &v) == PSIM_OK);
    double lid = 0;
    CHECK(psim_field_bilinear(u, 0.5, 1.0, &lid) == PSIM_OK);
    CHECK(lid == 1.0);
    Tmp tmp;
    CHECK(psim_cavity_write_outputs(sol, 65, tmp.dir.c_str()) == PSIM_OK);
    for (const char* f : {"u.csv", "v.csv", "centerlines.csv", "summary.json"}) CHECK(fs::exists(tmp.dir / f));
    double rmse = 0, mae = 0;
    CHECK(psim_cavity_compare_reference(sol, "u_vertical", (tmp / "missing.csv").c_str(), &rmse, &mae) == PSIM_ERR_IO);
    CHECK(psim_cavity_compare_reference(sol, "w", (tmp / "missing.csv").c_str(), &rmse, &mae) == PSIM_ERR_VALIDATION);
    psim_cavity_destroy(sol);

    cfg.n = 32;
    CHECK(psim_cavity_solve(&cfg, &sol) == PSIM_ERR_VALIDATION);
    CHECK(sol == nullptr);
    cfg.n = 33;
    cfg.re = 1000;
    cfg.dt = 0.5;
    CHECK(psim_cavity_solve(&cfg, &sol) == PSIM_ERR_SOLVER);
    CHECK(std::string(psim_last_error()).find("diverged") != std::string::npos);
}

TEST_CASE("plate and magnet") {
    psim_plate_config p = psim_plate_config_default();
    p.tension = 10000;
    double s = 0;
    CHECK(psim_plate_sigma_xx(&p, 0.0, 0.5, &s) == PSIM_OK);
    CHECK(s == doctest::Approx(30000));
    CHECK(psim_plate_sigma_xx(&p, 0.1, 0.1, &s) == PSIM_ERR_OUT_OF_DOMAIN);
    Tmp tmp;
    CHECK(psim_plate_write_outputs(&p, 100, 21, tmp.dir.c_str()) == PSIM_OK);
    CHECK(fs::exists(tmp.dir / "lines.csv"));
    CHECK(fs::exists(tmp.dir / "sigma_xx.csv"));

    psim_magnet_config m = psim_magnet_config_default();
    m.n = 33;
    psim_magnet* sol = nullptr;
    REQUIRE(psim_magnet_solve(&m, &sol) == PSIM_OK);
    int iters = 0, conv = 0;
    CHECK(psim_magnet_info(sol, &iters, &conv, nullptr) == PSIM_OK);
    CHECK(conv == 1);
    CHECK(psim_magnet_write_outputs(sol, tmp.dir.c_str()) == PSIM_OK);
    CHECK(fs::exists(tmp.dir / "line.csv"));
    psim_magnet_destroy(sol);
}

TEST_CASE("forest train, predict, save and load") {
    const char* names[] = {"x"};
    psim_dataset* ds = nullptr;
    REQUIRE(psim_dataset_create(names, 1, &ds) == PSIM_OK);
    const double x0 = 0.0, x1 = 1.0;
    CHECK(psim_dataset_add_row(ds, &x0, 0.0) == PSIM_OK);
    CHECK(psim_dataset_add_row(ds, &x1, 10.0) == PSIM_OK);
    psim_forest_params hp = psim_forest_params_default();
    CHECK(hp.n_trees == 200);
    psim_forest* f = nullptr;
    REQUIRE(psim_forest_fit(ds, &hp, 42, 2, &f) == PSIM_OK);
    const double q[] = {0.0, 0.5, 1.0};
    double out[3];
    CHECK(psim_forest_predict(f, q, 3, out) == PSIM_OK);
    CHECK(out[0] == 0.0);
    CHECK(out[2] == 10.0);

    Tmp tmp;
    CHECK(psim_forest_save(f, (tmp / "m.json").c_str()) == PSIM_OK);
    psim_forest* g = nullptr;
    REQUIRE(psim_forest_load((tmp / "m.json").c_str(), &g) == PSIM_OK);
    double back[3];
    CHECK(psim_forest_predict(g, q, 3, back) == PSIM_OK);
    for (int k = 0; k < 3; ++k) CHECK(back[k] == out[k]);

    std::ofstream(tmp / "bad.json") << "{\"schema_version\": 1, \"trees\": [";
    psim_forest* h = nullptr;
    CHECK(psim_forest_load((tmp / "bad.json").c_str(), &h) == PSIM_ERR_PARSE);
    CHECK(h == nullptr);
    CHECK(psim_forest_load((tmp / "none.json").c_str(), &h) == PSIM_ERR_IO);

    std::ofstream(tmp / "in.csv") << "id,x\na,0\nb,1\n";
    CHECK(psim_forest_predict_csv(f, (tmp / "in.csv").c_str(), (tmp / "out.csv").c_str()) == PSIM_OK);
    std::ifstream in(tmp / "out.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "id,x,prediction");

    std::ofstream(tmp / "wrong.csv") << "y\n0\n";
    CHECK(psim_forest_predict_csv(f, (tmp / "wrong.csv").c_str(), (tmp / "o2.csv").c_str()) == PSIM_ERR_VALIDATION);
    CHECK(std::string(psim_last_error()).find("'x'") != std::string::npos);

    psim_forest_destroy(f);
    psim_forest_destroy(g);
    psim_dataset_destroy(ds);
}

TEST_CASE("dataset from CSV reports bad cells") {
    Tmp tmp;
    std::ofstream(tmp / "d.csv") << "a,b,t\n1,2,3\n4,oops,6\n";
    const char* names[] = {"a", "b"};
    psim_dataset* ds = nullptr;
    CHECK(psim_dataset_read_csv((tmp / "d.csv").c_str(), names, 2, "t", &ds) == PSIM_ERR_VALIDATION);
    const std::string msg = psim_last_error();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
    CHECK(psim_dataset_read_csv((tmp / "d.csv").c_str(), names, 2, "missing", &ds) == PSIM_ERR_VALIDATION);
}

TEST_CASE("experiments, reports and string buffers") {
    psim_benchmark_options o = psim_benchmark_options_default(1);
    CHECK(o.ns_grid == 65);
    CHECK(o.superres_coarse == 33);
    o.jobs = 2;
    Tmp tmp;
    psim_report* r = nullptr;
    REQUIRE(psim_benchmark_run("sin-superres", &o, tmp.dir.c_str(), &r) == PSIM_OK);
    for (const char* f : {"report.json", "comparison.txt", "comparison.csv", "actual_fine.csv", "predicted_fine.csv"})
        CHECK(fs::exists(tmp.dir / "sin-superres" / f));
    double rmse = 0;
    CHECK(psim_report_measured(r, "fine", "rmse", &rmse) == PSIM_OK);
    CHECK(rmse <= 0.03);
    CHECK(psim_report_measured(r, "nothing", "rmse", &rmse) == PSIM_ERR_VALIDATION);

    size_t needed = 0;
    CHECK(psim_report_table_text(r, nullptr, 0, &needed) == PSIM_OK);
    CHECK(needed > 20);
    std::vector<char> small(8, 'x');
    CHECK(psim_report_table_text(r, small.data(), small.size(), &needed) == PSIM_OK);
    CHECK(std::string(small.data()).size() == 7);
    std::string full(needed + 1, '\0');
    CHECK(psim_report_table_text(r, full.data(), full.size(), nullptr) == PSIM_OK);
    CHECK(full.find("fine rmse") != std::string::npos);

    psim_report* back = nullptr;
    REQUIRE(psim_report_read((tmp.dir / "sin-superres" / "report.json").c_str(), &back) == PSIM_OK);
    double rmse2 = 0;
    CHECK(psim_report_measured(back, "fine", "rmse", &rmse2) == PSIM_OK);
    CHECK(rmse2 == rmse);
    psim_report_destroy(back);
    psim_report_destroy(r);

    CHECK(psim_benchmark_run("heat", &o, nullptr, &r) == PSIM_ERR_VALIDATION);

    CHECK(psim_sweep_run_json("{\"problem\": \"stress\"}", 2, nullptr, &r) == PSIM_OK);
    CHECK(psim_report_measured(r, "T=6000", "rmse", &rmse) == PSIM_OK);
    psim_report_destroy(r);
    CHECK(psim_sweep_run_json("{not json", 1, nullptr, &r) == PSIM_ERR_PARSE);
    CHECK(psim_sweep_run_json("{\"problem\": \"stress\", \"test_values\": [0]}", 1, nullptr, &r) ==
          PSIM_ERR_VALIDATION);

    CHECK(psim_default_config_json("em", nullptr, 0, &needed) == PSIM_OK);
    CHECK(needed > 0);
    CHECK(psim_default_config_json("heat", nullptr, 0, &needed) == PSIM_ERR_VALIDATION);
}
