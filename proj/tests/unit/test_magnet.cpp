/// @file test_magnet.cpp
/// @brief Magnetic scalar potential: direct-solve oracle and Laplace properties.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "magnet.hpp"

using namespace psim;

namespace {

/// Direct sparse LU solve of the same 5-point problem, with the Dirichlet data
/// rebuilt here from the rectangle geometry.
ScalarField2D direct_solve(const MagnetConfig& cfg) {
    const GridSpec& g = cfg.domain;
    const Rect& m = cfg.magnet;
    const double eps = 1e-9 * g.hx();
    std::vector<int> frozen(g.size(), 0);
    int jlo = g.ny, jhi = -1;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.x(i) >= m.x_min - eps && g.x(i) <= m.x_max + eps && g.y(j) >= m.y_min - eps &&
                g.y(j) <= m.y_max + eps) {
                frozen[j * g.nx + i] = 1;
                jlo = std::min(jlo, j);
                jhi = std::max(jhi, j);
            }
    std::vector<double> known(g.size(), 0.0);
    for (int j = jlo; j <= jhi; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (frozen[j * g.nx + i]) known[j * g.nx + i] = cfg.psi0 * (2.0 * (j - jlo) / (jhi - jlo) - 1.0);

    std::vector<int> unknown(g.size(), -1);
    int n = 0;
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i)
            if (!frozen[j * g.nx + i]) unknown[j * g.nx + i] = n++;

    const double ax = 1.0 / (g.hx() * g.hx()), ay = 1.0 / (g.hy() * g.hy());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            const int row = unknown[j * g.nx + i];
            if (row < 0) continue;
            trip.emplace_back(row, row, -2 * ax - 2 * ay);
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (int k = 0; k < 4; ++k) {
                const int idx = nb[k][1] * g.nx + nb[k][0];
                const double w = k < 2 ? ax : ay;
                if (unknown[idx] >= 0) trip.emplace_back(row, unknown[idx], w);
                else b[row] -= w * known[idx];
            }
        }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    REQUIRE(lu.info() == Eigen::Success);
    const Eigen::VectorXd x = lu.solve(b);

    ScalarField2D out(g);
    for (std::size_t k = 0; k < g.size(); ++k) out.values()[k] = unknown[k] >= 0 ? x[unknown[k]] : known[k];
    return out;
}

double max_abs_diff(const ScalarField2D& a, const ScalarField2D& b) {
    double d = 0;
    for (std::size_t k = 0; k < a.values().size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
    return d;
}

MagnetConfig small(double psi0) {
    MagnetConfig c;
    c.psi0 = psi0;
    c.domain = GridSpec::square(65, -2.0, 2.0);
    return c;
}

}  // namespace

TEST_CASE("zero potential gives zero fields") {
    const MagnetSolution s = solve_magnet(small(0.0));
    for (double v : s.psi.values()) CHECK(v == 0.0);
    for (double v : s.h_mag.values()) CHECK(v == 0.0);
    const SampleLine l = sample_field_line(s, default_field_line());
    CHECK(l.values.size() == 51);
    for (double v : l.values) CHECK(v == 0.0);
}

TEST_CASE("default geometry agrees with a sparse direct solve") {
    const MagnetConfig cfg;  // psi0 = 1, 129 x 129 over [-2, 2]^2
    const MagnetSolution s = solve_magnet(cfg);
    REQUIRE(s.converged);
    const ScalarField2D ref = direct_solve(cfg);
    CHECK(max_abs_diff(s.psi, ref) <= 1e-6);

    const GridSpec& g = cfg.domain;
    const int i = static_cast<int>(std::lround((1.0 - g.x_min) / g.hx()));
    const int j = static_cast<int>(std::lround((0.0 - g.y_min) / g.hy()));
    CHECK(std::abs(s.psi(i, j) - ref(i, j)) <= 1e-6);

    // Peak of |H| along the default line, located on the direct-solve field.
    // The symmetric geometry gives two mirror-image maxima near the pole corners.
    const SampleLine line = sample_field_line(s, default_field_line());
    MagnetSolution oracle = s;
    oracle.psi = ref;
    oracle.h_mag = gradient_magnitude(ref);
    const SampleLine ref_line = sample_field_line(oracle, default_field_line());
    const auto peak = std::max_element(ref_line.values.begin(), ref_line.values.end()) - ref_line.values.begin();
    const auto got = std::max_element(line.values.begin(), line.values.end()) - line.values.begin();
    const auto mirror = static_cast<long>(line.values.size()) - 1 - peak;
    CHECK((got == peak || got == mirror));
    CHECK(line.values[got] == doctest::Approx(ref_line.values[peak]).epsilon(1e-6));
}

TEST_CASE("linearity in psi0") {
    const MagnetSolution one = solve_magnet(small(1.0));
    const MagnetSolution two = solve_magnet(small(2.0));
    CHECK(max_abs_diff(two.psi, [&] {
              ScalarField2D f = one.psi;
              for (double& v : f.values()) v *= 2.0;
              return f;
          }()) <= 1e-8);
    const SampleLine l1 = sample_field_line(one, default_field_line());
    const SampleLine l2 = sample_field_line(two, default_field_line());
    for (std::size_t k = 0; k < l1.values.size(); ++k) CHECK(std::abs(l2.values[k] - 2 * l1.values[k]) <= 1e-8);

    for (double alpha : {0.1, 0.7, 3.5}) {
        const MagnetSolution a = solve_magnet(small(alpha));
        double d = 0;
        for (std::size_t k = 0; k < a.psi.values().size(); ++k)
            d = std::max(d, std::abs(a.psi.values()[k] - alpha * one.psi.values()[k]));
        CHECK(d <= 10 * small(alpha).solver_tol * std::max(1.0, alpha));
    }
}

TEST_CASE("sign flip of the potential leaves |H| unchanged") {
    const MagnetSolution pos = solve_magnet(small(1.3));
    ScalarField2D flipped = pos.psi;
    for (double& v : flipped.values()) v = -v;
    const ScalarField2D h = gradient_magnitude(flipped);
    for (std::size_t k = 0; k < h.values().size(); ++k) CHECK(h.values()[k] == pos.h_mag.values()[k]);
    CHECK_THROWS_AS(solve_magnet(small(-1.3)), Error);
}

TEST_CASE("discrete maximum principle and antisymmetry") {
    const MagnetConfig cfg = small(1.0);
    const MagnetSolution s = solve_magnet(cfg);
    const GridSpec& g = cfg.domain;
    double bmax = -1e300, bmin = 1e300;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const bool fixed = i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1 || s.frozen[s.psi.index(i, j)];
            if (fixed) {
                bmax = std::max(bmax, s.psi(i, j));
                bmin = std::min(bmin, s.psi(i, j));
            }
        }
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            if (s.frozen[s.psi.index(i, j)]) continue;
            CHECK(s.psi(i, j) < bmax);
            CHECK(s.psi(i, j) > bmin);
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(std::abs(s.psi(i, j) + s.psi(i, g.ny - 1 - j)) <= 10 * cfg.solver_tol);
}

TEST_CASE("gradient magnitude of an affine field is exact") {
    const GridSpec g{9, 7, 0, 2, -1, 1};
    ScalarField2D f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = 3 * g.x(i) - 4 * g.y(j) + 1;
    const ScalarField2D h = gradient_magnitude(f);
    for (double v : h.values()) CHECK(v == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("lines through the magnet and bad configs are rejected") {
    const MagnetSolution s = solve_magnet(small(1.0));
    CHECK_THROWS_AS(sample_field_line(s, {{0.0, -1.5}, {0.0, 1.5}, 51}), Error);
    CHECK_THROWS_AS(sample_field_line(s, {{-1.0, 0.0}, {1.0, 0.0}, 51}), Error);
    CHECK_NOTHROW(sample_field_line(s, {{0.3, -1.5}, {0.3, 1.5}, 51}));

    MagnetConfig bad = small(1.0);
    bad.magnet = {-3, 3, -0.5, 0.5};
    CHECK_THROWS_AS(solve_magnet(bad), Error);
    bad = small(1.0);
    bad.solver_tol = -1;
    CHECK_THROWS_AS(solve_magnet(bad), Error);
    bad = small(NAN);
    CHECK_THROWS_AS(solve_magnet(bad), Error);
}
