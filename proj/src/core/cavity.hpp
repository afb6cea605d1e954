/// @file cavity.hpp
/// @brief Lid-driven cavity: explicit projection solver on a collocated grid.
///
/// The unit square is discretised with n x n nodes. The lid (j = n-1) moves in +x
/// with unit speed, the other walls are no-slip, density is 1 and the kinematic
/// viscosity is 1/Re. Each step advances an intermediate velocity with central
/// differences, solves a pressure Poisson problem with SOR, then subtracts the
/// pressure gradient. The Poisson operator is the composition of the central
/// divergence with the central gradient, so the corrected velocity has a central
/// divergence equal to the Poisson residual.

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "grid.hpp"
#include "metrics.hpp"

namespace psim {

struct CavityConfig {
    double re = 100.0;
    /// Nodes per side. Must be odd: the collocated projection needs an odd number
    /// of interior nodes per side for the discrete Poisson problem to be solvable.
    int n = 129;
    /// Time step; empty selects 0.25 * min(h^2 Re / 4, h).
    std::optional<double> dt;
    double steady_tol = 1e-6;
    long max_steps = 2'000'000;
    /// Max Poisson residual (divergence units); empty selects 100 * steady_tol.
    /// Looser settings put a noise floor on the per-step change above steady_tol.
    std::optional<double> poisson_tol;
    int poisson_max_iters = 20'000;

    void validate() const;
    double spacing() const { return 1.0 / (n - 1); }
    double time_step() const;
    double pressure_tol() const { return poisson_tol.value_or(100.0 * steady_tol); }
};

struct CavitySolution {
    ScalarField2D u;
    ScalarField2D v;
    long steps_taken = 0;
    bool converged = false;
    std::vector<double> residual_history;
    double wall_time_s = 0.0;
};

/// Time-stepping state, exposed so tests can inspect individual steps.
class CavityStepper {
public:
    explicit CavityStepper(const CavityConfig& cfg);

    /// Advances one time step and returns the max nodal velocity change.
    /// Throws SolverDiverged if any value turns non-finite.
    double step();

    const ScalarField2D& u() const { return u_; }
    const ScalarField2D& v() const { return v_; }
    const CavityConfig& config() const { return cfg_; }
    long steps() const { return steps_; }
    /// SOR sweeps used by the most recent pressure solve.
    int last_poisson_iters() const { return last_iters_; }

private:
    void build_operator();
    int solve_pressure();
    void apply_boundary();

    CavityConfig cfg_;
    int n_;
    double h_;
    double dt_;
    double nu_;
    double omega_;
    ScalarField2D u_, v_;
    std::vector<double> us_, vs_, phi_, rhs_;
    // Banded 1D factor of the Poisson operator: five coefficients per interior index.
    std::vector<double> band_;
    long steps_ = 0;
    int last_iters_ = 0;
};

/// Runs the stepper until the per-step change drops to steady_tol or max_steps is reached.
CavitySolution solve_cavity(const CavityConfig& cfg);

/// Max |du/dx + dv/dy| over interior nodes using central differences.
double max_central_divergence(const ScalarField2D& u, const ScalarField2D& v);

struct CenterlineProfiles {
    SampleLine u_vertical;    ///< u along x = 0.5, y from 0 to 1
    SampleLine v_horizontal;  ///< v along y = 0.5, x from 0 to 1
};

CenterlineProfiles centerline_profiles(const ScalarField2D& u, const ScalarField2D& v, int n_points = 65);
inline CenterlineProfiles centerline_profiles(const CavitySolution& sol, int n_points = 65) {
    return centerline_profiles(sol.u, sol.v, n_points);
}

/// Published centreline values: `station,value` CSV with a header row.
struct ReferenceProfile {
    std::vector<double> station;
    std::vector<double> value;
};

ReferenceProfile read_reference_profile(const std::filesystem::path& path);
void write_reference_profile(const ReferenceProfile& ref, const std::filesystem::path& path);

/// Linear interpolation of a sampled profile at arc-length fraction `s`.
double profile_at(const SampleLine& profile, double s);

/// RMSE/MAE of the profile, interpolated to the reference stations, against the reference values.
Metrics validate_against_reference(const SampleLine& profile, const ReferenceProfile& ref);
Metrics validate_against_reference(const SampleLine& profile, const std::filesystem::path& reference_path);

}  // namespace psim
