#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace psim {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size()) {
        throw validation_error("metric inputs differ in length (" + std::to_string(pred.size()) + " vs " +
                               std::to_string(actual.size()) + ")");
    }
    if (pred.empty()) throw validation_error("metric inputs are empty");
    for (std::size_t k = 0; k < pred.size(); ++k) {
        if (!std::isfinite(pred[k]) || !std::isfinite(actual[k])) {
            throw validation_error("non-finite metric input at index " + std::to_string(k));
        }
    }
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    double ss = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double d = pred[k] - actual[k];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    double sa = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) sa += std::abs(pred[k] - actual[k]);
    return sa / static_cast<double>(pred.size());
}

Metrics compute_metrics(std::span<const double> pred, std::span<const double> actual) {
    const double r = rmse(pred, actual);
    // mae <= rmse holds exactly in real arithmetic; rounding can break it by an ulp.
    return {r, std::min(mae(pred, actual), r), pred.size()};
}

Metrics aggregate(std::span<const Metrics> parts) {
    if (parts.empty()) throw validation_error("cannot aggregate zero metric sets");
    double ss = 0.0, sa = 0.0;
    std::size_t n = 0;
    for (const Metrics& m : parts) {
        if (m.n == 0) throw validation_error("metric part with n = 0");
        const double w = static_cast<double>(m.n);
        ss += w * m.rmse * m.rmse;
        sa += w * m.mae;
        n += m.n;
    }
    const double r = std::sqrt(ss / static_cast<double>(n));
    return {r, std::min(sa / static_cast<double>(n), r), n};
}

double TimingLog::total(const std::string& label) const {
    double s = 0.0;
    for (const auto& [name, secs] : entries) {
        if (name == label) s += secs;
    }
    return s;
}

}  // namespace psim
