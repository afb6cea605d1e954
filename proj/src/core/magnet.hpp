/// @file magnet.hpp
/// @brief Magnetic scalar potential around a rectangular magnet (2D Laplace, SOR).

#pragma once

#include <optional>
#include <vector>

#include "grid.hpp"

namespace psim {

struct Rect {
    double x_min = -0.25;
    double x_max = 0.25;
    double y_min = -0.5;
    double y_max = 0.5;
};

struct MagnetConfig {
    double psi0 = 1.0;  ///< |psi| on the pole faces
    GridSpec domain = GridSpec::square(129, -2.0, 2.0);
    Rect magnet;
    /// Stop when the max normalised residual falls below solver_tol * |psi0|.
    double solver_tol = 1e-10;
    int max_iters = 200'000;
    /// SOR relaxation; empty selects 2 / (1 + sin(pi / n)).
    std::optional<double> omega;

    void validate() const;
};

struct MagnetSolution {
    ScalarField2D psi;
    ScalarField2D h_mag;                 ///< |grad psi|
    std::vector<unsigned char> frozen;   ///< 1 on magnet nodes (Dirichlet data)
    Rect magnet;
    int iters = 0;
    bool converged = false;
    double wall_time_s = 0.0;
};

MagnetSolution solve_magnet(const MagnetConfig& cfg);

/// |grad f| with central differences inside and one-sided differences on the boundary.
ScalarField2D gradient_magnitude(const ScalarField2D& f);

/// Vertical line beside the magnet, x = 0.35, y in [-1.5, 1.5], 51 points.
LineSpec default_field_line();

/// Samples h_mag along `line`. Throws a validation error if the line touches the magnet.
SampleLine sample_field_line(const MagnetSolution& sol, const LineSpec& line);

}  // namespace psim
