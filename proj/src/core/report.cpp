#include "report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "error.hpp"
#include "io.hpp"

namespace psim {

using nlohmann::json;

namespace {

constexpr int kReportSchemaVersion = 1;

}  // namespace

std::optional<double> ExperimentReport::measured(const std::string& label, const std::string& metric) const {
    if (label == "timing") {
        auto it = timing.find(metric);
        if (it == timing.end()) return std::nullopt;
        return it->second;
    }
    for (const auto& e : entries) {
        if (e.label != label) continue;
        if (metric == "rmse") return e.metrics.rmse;
        if (metric == "mae") return e.metrics.mae;
    }
    return std::nullopt;
}

void ExperimentReport::validate() const {
    for (const auto& e : entries) {
        if (!std::isfinite(e.metrics.rmse) || !std::isfinite(e.metrics.mae)) {
            throw validation_error("report entry '" + e.label + "' has non-finite metrics");
        }
    }
    for (const auto& [k, v] : timing) {
        if (!std::isfinite(v)) throw validation_error("report timing '" + k + "' is non-finite");
    }
}

json report_to_json(const ExperimentReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries) {
        entries.push_back({{"label", e.label},
                           {"parameter", e.parameter ? json(*e.parameter) : json(nullptr)},
                           {"rmse", e.metrics.rmse},
                           {"mae", e.metrics.mae},
                           {"n", e.metrics.n}});
    }
    json refs = json::array();
    for (const auto& ref : r.paper_reference_values) {
        refs.push_back({{"label", ref.label}, {"metric", ref.metric}, {"value", ref.value}});
    }
    return {{"schema_version", kReportSchemaVersion},
            {"experiment_id", r.experiment_id},
            {"seed", r.seed},
            {"config", r.config},
            {"results", std::move(entries)},
            {"timing", r.timing},
            {"paper_reference_values", std::move(refs)},
            {"timestamp", r.timestamp}};
}

ExperimentReport report_from_json(const json& doc) {
    try {
        if (!doc.is_object() || !doc.contains("schema_version")) throw parse_error("report lacks schema_version");
        const int version = doc.at("schema_version").get<int>();
        if (version != kReportSchemaVersion) {
            throw Error(ErrorKind::SchemaMismatch, "report schema_version " + std::to_string(version) +
                                                       " is not supported (expected " +
                                                       std::to_string(kReportSchemaVersion) + ")");
        }
        ExperimentReport r;
        r.experiment_id = doc.at("experiment_id").get<std::string>();
        r.seed = doc.at("seed").get<std::uint64_t>();
        r.config = doc.at("config");
        for (const json& e : doc.at("results")) {
            ReportEntry entry;
            entry.label = e.at("label").get<std::string>();
            if (!e.at("parameter").is_null()) entry.parameter = e.at("parameter").get<double>();
            entry.metrics = {e.at("rmse").get<double>(), e.at("mae").get<double>(), e.at("n").get<std::size_t>()};
            r.entries.push_back(std::move(entry));
        }
        r.timing = doc.at("timing").get<std::map<std::string, double>>();
        for (const json& ref : doc.at("paper_reference_values")) {
            r.paper_reference_values.push_back(
                {ref.at("label").get<std::string>(), ref.at("metric").get<std::string>(), ref.at("value").get<double>()});
        }
        r.timestamp = doc.at("timestamp").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw parse_error(std::string("invalid report JSON: ") + e.what());
    }
}

void write_report(const ExperimentReport& report, const std::filesystem::path& path) {
    report.validate();
    write_file_atomic(path, report_to_json(report).dump(2) + "\n");
}

ExperimentReport read_report(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(path.string() + ": malformed report JSON: " + e.what());
    }
    return report_from_json(doc);
}

std::string deterministic_view(const ExperimentReport& report) {
    json doc = report_to_json(report);
    doc.erase("timestamp");
    doc.erase("timing");
    return doc.dump(2);
}

namespace {

struct Row {
    std::string quantity;
    std::string measured;
    std::string reference;
    std::string ratio;
};

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::setprecision(6) << v;
    return ss.str();
}

std::vector<Row> comparison_rows(const ExperimentReport& r) {
    std::vector<Row> rows;
    for (const auto& ref : r.paper_reference_values) {
        Row row;
        row.quantity = ref.label == "timing" ? ref.metric : ref.label + " " + ref.metric;
        row.reference = fmt(ref.value);
        const auto m = r.measured(ref.label, ref.metric);
        row.measured = m ? fmt(*m) : "-";
        row.ratio = m && ref.value != 0.0 ? fmt(*m / ref.value) : "-";
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string comparison_table_text(const ExperimentReport& r) {
    const auto rows = comparison_rows(r);
    const Row head{"quantity", "measured", "reference", "ratio"};
    std::size_t w[4] = {head.quantity.size(), head.measured.size(), head.reference.size(), head.ratio.size()};
    for (const auto& row : rows) {
        w[0] = std::max(w[0], row.quantity.size());
        w[1] = std::max(w[1], row.measured.size());
        w[2] = std::max(w[2], row.reference.size());
        w[3] = std::max(w[3], row.ratio.size());
    }
    std::ostringstream out;
    out << r.experiment_id << " (seed " << r.seed << ")\n";
    auto line = [&](const Row& row) {
        out << std::left << std::setw(static_cast<int>(w[0])) << row.quantity << "  " << std::right
            << std::setw(static_cast<int>(w[1])) << row.measured << "  " << std::setw(static_cast<int>(w[2]))
            << row.reference << "  " << std::setw(static_cast<int>(w[3])) << row.ratio << "\n";
    };
    line(head);
    out << std::string(w[0] + w[1] + w[2] + w[3] + 6, '-') << "\n";
    for (const auto& row : rows) line(row);
    return out.str();
}

std::string comparison_table_csv(const ExperimentReport& r) {
    CsvWriter csv;
    csv.header({"experiment", "quantity", "measured", "reference", "ratio"});
    for (const auto& row : comparison_rows(r)) {
        csv.row_cells({r.experiment_id, row.quantity, row.measured, row.reference, row.ratio});
    }
    return csv.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

}  // namespace psim
