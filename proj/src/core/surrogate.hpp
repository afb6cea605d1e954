/// @file surrogate.hpp
/// @brief Parameter-interpolation and grid super-resolution experiments.
///
/// Interpolation: run a solver across a parameter sweep, extract the problem's
/// sample lines, train one forest per line on (parameter, s) for the training
/// parameters and predict the held-out ones. Super-resolution: train on (x, y)
/// at coarse nodes and predict every node of a finer grid over the same range.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cavity.hpp"
#include "forest.hpp"
#include "grid.hpp"
#include "magnet.hpp"
#include "metrics.hpp"
#include "plate.hpp"

namespace psim {

enum class Problem { NavierStokes, Stress, Electromagnetic };

std::string_view to_string(Problem p);
/// Accepts "navier_stokes"/"ns", "stress", "electromagnetic"/"em".
Problem parse_problem(std::string_view name);

struct SweepConfig {
    Problem problem = Problem::NavierStokes;
    std::vector<double> parameter_values;
    std::vector<double> test_values;
    CavityConfig cavity;
    int centerline_points = 65;
    PlateConfig plate;
    int plate_points = 100;
    MagnetConfig magnet;
    LineSpec field_line = default_field_line();
    ForestHyperparams forest;
    std::uint64_t seed = 42;

    /// Enforces strictly increasing values, test values drawn from the sweep, at
    /// least two training values, and test values strictly inside the training span.
    void validate() const;
    std::vector<double> train_values() const;
};

/// Lines produced by one simulation run, in a fixed order.
struct SimulationLines {
    std::vector<std::string> ids;
    std::vector<SampleLine> lines;
    double seconds = 0.0;
};

/// Runs the configured solver at one parameter value and extracts its sample lines.
SimulationLines simulate_lines(const SweepConfig& cfg, double parameter);

struct LinePrediction {
    std::string line_id;
    SampleLine actual;
    SampleLine predicted;
};

struct TestCase {
    double parameter = 0.0;
    std::vector<LinePrediction> lines;
    Metrics metrics;  ///< pooled over all lines
};

struct InterpolationResult {
    std::vector<TestCase> tests;
    std::vector<double> sim_seconds;  ///< per parameter value, sweep order
    double sim_seconds_per_run = 0.0;
    double ml_train_predict_seconds = 0.0;
    /// Per line: training target range of its forest.
    std::vector<std::pair<double, double>> line_target_ranges;
};

InterpolationResult run_interpolation(const SweepConfig& cfg, int jobs = 1);

/// Interpolation-phase only: forests trained on `runs` at the training values.
/// `runs` is indexed like cfg.parameter_values.
InterpolationResult interpolate_runs(const SweepConfig& cfg, const std::vector<SimulationLines>& runs, int jobs = 1);

enum class SuperResSource { SinXY, NavierStokes };

std::string_view to_string(SuperResSource s);

struct AugmentPoint {
    Point at;
    double target = 0.0;
};

struct SuperResConfig {
    SuperResSource source = SuperResSource::SinXY;
    GridSpec coarse;
    GridSpec fine;
    std::vector<AugmentPoint> augment;
    ForestHyperparams forest;
    std::uint64_t seed = 42;
    double base_re = 400.0;
    /// Solver settings for the cavity source; n is taken from the grids.
    CavityConfig cavity;

    void validate() const;
};

struct SuperResResult {
    ScalarField2D predicted_fine;
    ScalarField2D actual_fine;
    Metrics metrics;
    double fine_sim_seconds = 0.0;
    double coarse_sim_seconds = 0.0;
    double forest_seconds = 0.0;
    /// fine_sim_seconds / (coarse_sim_seconds + forest_seconds); empty for sin_xy.
    std::optional<double> speedup;
    bool coarse_converged = true;
    bool fine_converged = true;
};

SuperResResult run_superres(const SuperResConfig& cfg, int jobs = 1);

/// Navier-Stokes, stress and electromagnetic sweeps with their default held-out values.
std::array<SweepConfig, 3> canonical_sweeps();

/// 10x10 over [0.1, 1]^2 plus (0, 0) -> 100x100 over [0.01, 1]^2.
SuperResConfig canonical_sin_superres();

/// Cavity u at the base Re, coarse_n x coarse_n -> fine_n x fine_n.
SuperResConfig canonical_ns_superres(int coarse_n = 65, int fine_n = 257);

}  // namespace psim
