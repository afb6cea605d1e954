/// @file test_slow.cpp
/// @brief Long cavity runs on fine grids. Enabled with PSIM_SLOW_TESTS.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <map>

#include "cavity.hpp"
#include "doctest.h"
#include "grid.hpp"

namespace fs = std::filesystem;
using namespace psim;

namespace {

const CavitySolution& solve_cached(int n, double steady_tol) {
    static std::map<std::pair<int, double>, CavitySolution> cache;
    auto key = std::make_pair(n, steady_tol);
    auto it = cache.find(key);
    if (it == cache.end()) {
        CavityConfig cfg;
        cfg.re = 100.0;
        cfg.n = n;
        cfg.steady_tol = steady_tol;
        it = cache.emplace(key, solve_cavity(cfg)).first;
        MESSAGE("n=" << n << " steady_tol=" << steady_tol << ": " << it->second.steps_taken << " steps, "
                     << it->second.wall_time_s << " s");
    }
    REQUIRE(it->second.converged);
    return it->second;
}

}  // namespace

TEST_CASE("centre velocity agrees with a finer, tighter run") {
    const double coarse = bilinear_at(solve_cached(129, 1e-6).u, 0.5, 0.5);
    const double fine = bilinear_at(solve_cached(257, 1e-7).u, 0.5, 0.5);
    MESSAGE("u(0.5, 0.5): 129 -> " << coarse << ", 257 -> " << fine);
    CHECK(std::abs(coarse - fine) <= 0.01);
}

// Recorded rather than required: the published table carries its own
// discretisation error, so finer grids need not move closer to it.
TEST_CASE("grid refinement against the published centreline" * doctest::may_fail()) {
    const fs::path ref = fs::path(PSIM_DATA_DIR) / "ghia" / "re100_u_vertical.csv";
    double rmse[3];
    const int sizes[3] = {65, 129, 257};
    for (int k = 0; k < 3; ++k) {
        const CavitySolution& sol = solve_cached(sizes[k], sizes[k] == 257 ? 1e-7 : 1e-6);
        rmse[k] = validate_against_reference(centerline_profiles(sol).u_vertical, ref).rmse;
        MESSAGE("n=" << sizes[k] << " rmse=" << rmse[k]);
    }
    CHECK(rmse[1] < rmse[0]);
    CHECK(rmse[2] < rmse[1]);
}
