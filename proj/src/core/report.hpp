/// @file report.hpp
/// @brief Experiment report: JSON persistence and comparison tables.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "metrics.hpp"

namespace psim {

struct ReportEntry {
    std::string label;                 ///< e.g. "Re=300"
    std::optional<double> parameter;   ///< swept value, when there is one
    Metrics metrics;
    friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

/// Published value shown next to the measured one. Display only, never a pass/fail oracle.
struct ReferenceValue {
    std::string label;   ///< matches a ReportEntry label, or "timing"
    std::string metric;  ///< "rmse", "mae", or a timing key
    double value = 0.0;
    friend bool operator==(const ReferenceValue&, const ReferenceValue&) = default;
};

struct ExperimentReport {
    std::string experiment_id;
    std::uint64_t seed = 0;
    nlohmann::json config = nlohmann::json::object();
    std::vector<ReportEntry> entries;
    std::map<std::string, double> timing;
    std::vector<ReferenceValue> paper_reference_values;
    std::string timestamp;

    /// Measured value for (label, metric): entry metrics, or timing when label == "timing".
    std::optional<double> measured(const std::string& label, const std::string& metric) const;
    /// Throws a validation error when any metric or timing value is non-finite.
    void validate() const;

    friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& doc);

void write_report(const ExperimentReport& report, const std::filesystem::path& path);
ExperimentReport read_report(const std::filesystem::path& path);

/// Report JSON with the timestamp and timing block removed, for determinism checks.
std::string deterministic_view(const ExperimentReport& report);

/// Aligned plain-text table: quantity, measured, reference, ratio (measured / reference).
std::string comparison_table_text(const ExperimentReport& report);
std::string comparison_table_csv(const ExperimentReport& report);

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

}  // namespace psim
