/// @file experiments.hpp
/// @brief Benchmark drivers: canonical experiments, config JSON, reports and exports.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "report.hpp"
#include "surrogate.hpp"

namespace psim {

inline constexpr std::string_view kBenchmarkIds[] = {"ns", "stress", "em", "sin-superres", "ns-superres"};

struct BenchmarkOptions {
    std::uint64_t seed = 42;
    int jobs = 1;
    int ns_grid = 129;         ///< cavity grid for the Re sweep
    int superres_coarse = 65;  ///< cavity super-resolution grids
    int superres_fine = 257;
    /// Fast mode: 65 sweep grid and 33 -> 129 super-resolution.
    static BenchmarkOptions fast(std::uint64_t seed = 42, int jobs = 1);
};

nlohmann::json sweep_config_to_json(const SweepConfig& cfg);
/// Missing keys keep their defaults; the problem's canonical sweep fills the values when absent.
SweepConfig sweep_config_from_json(const nlohmann::json& doc);
nlohmann::json superres_config_to_json(const SuperResConfig& cfg);
SuperResConfig superres_config_from_json(const nlohmann::json& doc);

/// Published numbers for display next to measured ones.
std::vector<ReferenceValue> published_reference_values(std::string_view experiment_id);

ExperimentReport make_interpolation_report(const std::string& id, const SweepConfig& cfg,
                                           const InterpolationResult& result);
ExperimentReport make_superres_report(const std::string& id, const SuperResConfig& cfg, const SuperResResult& result);

/// `lines.csv` with `test_value,line_id,s,x,y,actual,predicted`.
void write_interpolation_outputs(const InterpolationResult& result, const std::filesystem::path& dir);
/// `actual_fine.csv` and `predicted_fine.csv` as grid CSVs.
void write_superres_outputs(const SuperResResult& result, const std::filesystem::path& dir);

/// Writes report.json, comparison.txt and comparison.csv into dir.
void write_report_bundle(const ExperimentReport& report, const std::filesystem::path& dir);

/// Runs one canonical experiment by id. When `out_dir` is non-empty, the report
/// bundle and plot data go to out_dir/<id>/.
ExperimentReport run_benchmark(std::string_view id, const BenchmarkOptions& opts,
                               const std::filesystem::path& out_dir = {});

}  // namespace psim
