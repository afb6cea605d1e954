/// @file test_cavity.cpp
/// @brief Lid-driven cavity: boundary conditions, projection accuracy, reference profiles.

#include <cmath>
#include <fstream>

#include "cavity.hpp"
#include "doctest.h"
#include "error.hpp"
#include "test_support.hpp"

using namespace psim;

namespace {

const std::filesystem::path kGhia = std::filesystem::path(PSIM_DATA_DIR) / "ghia";

void check_walls(const ScalarField2D& u, const ScalarField2D& v) {
    const int n = u.spec().nx;
    for (int k = 0; k < n; ++k) {
        CHECK(u(k, n - 1) == 1.0);
        CHECK(v(k, n - 1) == 0.0);
        CHECK(u(k, 0) == 0.0);
        CHECK(v(k, 0) == 0.0);
    }
    for (int j = 0; j < n - 1; ++j) {
        CHECK(u(0, j) == 0.0);
        CHECK(v(0, j) == 0.0);
        CHECK(u(n - 1, j) == 0.0);
        CHECK(v(n - 1, j) == 0.0);
    }
}

CavityConfig quick(int n = 33, double re = 100.0) {
    CavityConfig c;
    c.n = n;
    c.re = re;
    return c;
}

/// Re = 100 on 65 x 65, shared by several cases.
const CavitySolution& re100_65() {
    static const CavitySolution sol = solve_cavity(quick(65));
    return sol;
}

}  // namespace

TEST_CASE("config validation") {
    CavityConfig c = quick();
    c.n = 64;
    CHECK_THROWS_AS(c.validate(), Error);
    c = quick();
    c.n = 7;
    CHECK_THROWS_AS(c.validate(), Error);
    c = quick();
    c.re = -5;
    try {
        c.validate();
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        CHECK(std::string(e.what()).find("--re") != std::string::npos);
    }
    c = quick();
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = quick();
    c.steady_tol = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("automatic time step") {
    const CavityConfig c = quick(129, 100.0);
    const double h = 1.0 / 128;
    CHECK(c.time_step() == doctest::Approx(0.25 * std::min(h * h * 100 / 4, h)));
    CHECK(c.pressure_tol() == doctest::Approx(1e-4));
}

TEST_CASE("initial state") {
    // 65 profile points land on nodes of a 65 grid, so no interpolation blurs the lid.
    const CavityStepper s(quick(65));
    check_walls(s.u(), s.v());
    const int n = 65;
    for (int j = 0; j < n - 1; ++j)
        for (int i = 0; i < n; ++i) {
            CHECK(s.u()(i, j) == 0.0);
            CHECK(s.v()(i, j) == 0.0);
        }
    const CenterlineProfiles p = centerline_profiles(s.u(), s.v(), 65);
    for (std::size_t k = 0; k + 1 < p.u_vertical.values.size(); ++k) CHECK(p.u_vertical.values[k] == 0.0);
    CHECK(p.u_vertical.values.back() == 1.0);
}

TEST_CASE("property: walls exact and divergence bounded after every step") {
    for (double re : {100.0, 400.0}) {
        CavityStepper s(quick(33, re));
        const CavityConfig& cfg = s.config();
        for (int k = 0; k < 300; ++k) {
            s.step();
            check_walls(s.u(), s.v());
            CHECK(max_central_divergence(s.u(), s.v()) <= 10 * cfg.pressure_tol() * (cfg.n - 1));
        }
    }
}

TEST_CASE("divergence bound holds for a tight Poisson tolerance") {
    CavityConfig c = quick(33);
    c.poisson_tol = 1e-9;
    CavityStepper s(c);
    for (int k = 0; k < 50; ++k) {
        s.step();
        CHECK(max_central_divergence(s.u(), s.v()) <= 10 * 1e-9 * 32);
    }
}

TEST_CASE("converged Re=100 run") {
    const CavitySolution& sol = re100_65();
    REQUIRE(sol.converged);
    CHECK(sol.residual_history.back() <= 1e-6);
    for (double r : sol.residual_history) CHECK(std::isfinite(r));
    CHECK(sol.u.all_finite());
    CHECK(sol.v.all_finite());
    check_walls(sol.u, sol.v);

    const CenterlineProfiles p = centerline_profiles(sol);
    CHECK(p.u_vertical.values.front() == 0.0);
    CHECK(p.u_vertical.values.back() == 1.0);
    CHECK(*std::min_element(p.u_vertical.values.begin(), p.u_vertical.values.end()) < 0.0);

    const Metrics mu = validate_against_reference(p.u_vertical, kGhia / "re100_u_vertical.csv");
    const Metrics mv = validate_against_reference(p.v_horizontal, kGhia / "re100_v_horizontal.csv");
    CHECK(mu.rmse <= 0.02);
    CHECK(mv.rmse <= 0.02);
    CHECK(mu.n == 17);
}

TEST_CASE("idempotence at steady state") {
    CavityConfig c = quick(33);
    const CavitySolution a = solve_cavity(c);
    REQUIRE(a.converged);
    c.max_steps *= 2;
    const CavitySolution b = solve_cavity(c);
    CHECK(b.steps_taken == a.steps_taken);
    CHECK(std::equal(a.u.values().begin(), a.u.values().end(), b.u.values().begin()));
    CHECK(std::equal(a.v.values().begin(), a.v.values().end(), b.v.values().begin()));
}

TEST_CASE("step limit reports non-convergence") {
    CavityConfig c = quick(33);
    c.max_steps = 10;
    const CavitySolution s = solve_cavity(c);
    CHECK_FALSE(s.converged);
    CHECK(s.steps_taken == 10);
    CHECK(s.residual_history.size() == 10);
}

TEST_CASE("an unstable time step is reported as divergence") {
    CavityConfig c = quick(33, 1000.0);
    c.dt = 0.5;
    c.max_steps = 5000;
    try {
        solve_cavity(c);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SolverDiverged);
    }
}

TEST_CASE("reference profile comparisons") {
    test::TempDir dir;
    const CenterlineProfiles p = centerline_profiles(re100_65());
    ReferenceProfile self;
    for (std::size_t k = 0; k < p.u_vertical.s.size(); k += 4) {
        self.station.push_back(p.u_vertical.s[k]);
        self.value.push_back(p.u_vertical.values[k]);
    }
    write_reference_profile(self, dir / "self.csv");
    CHECK(validate_against_reference(p.u_vertical, dir / "self.csv").rmse == 0.0);

    SampleLine offset;
    offset.line = {{0, 0}, {0, 1}, 5};
    offset.s = {0, 0.25, 0.5, 0.75, 1};
    offset.values = {0.1, 0.1, 0.1, 0.1, 0.1};
    const ReferenceProfile zeros{{0, 0.25, 0.5, 0.75, 1}, {0, 0, 0, 0, 0}};
    const Metrics m = validate_against_reference(offset, zeros);
    CHECK(m.mae == doctest::Approx(0.1));
    CHECK(m.rmse == doctest::Approx(0.1));
    CHECK(profile_at(offset, 0.6) == doctest::Approx(0.1));
}

TEST_CASE("reference fixture errors") {
    test::TempDir dir;
    try {
        read_reference_profile(dir / "missing.csv");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
    std::ofstream(dir / "bad.csv") << "station,value\n0.5,abc\n";
    CHECK_THROWS_AS(read_reference_profile(dir / "bad.csv"), Error);
    std::ofstream(dir / "cols.csv") << "y,u\n0.5,1\n";
    CHECK_THROWS_AS(read_reference_profile(dir / "cols.csv"), Error);

    const ReferenceProfile ghia = read_reference_profile(kGhia / "re100_u_vertical.csv");
    CHECK(ghia.station.size() == 17);
    CHECK(ghia.station.front() == 0.0);
    CHECK(ghia.value.back() == 1.0);
}
