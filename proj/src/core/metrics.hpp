/// @file metrics.hpp
/// @brief Error metrics and wall-clock timing.

#pragma once

#include <chrono>
#include <exception>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace psim {

struct Metrics {
    double rmse = 0.0;
    double mae = 0.0;
    std::size_t n = 0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

double rmse(std::span<const double> pred, std::span<const double> actual);
double mae(std::span<const double> pred, std::span<const double> actual);
Metrics compute_metrics(std::span<const double> pred, std::span<const double> actual);

/// Pooled metrics, as if computed over the concatenated residuals of all parts.
Metrics aggregate(std::span<const Metrics> parts);

/// Labelled durations collected by time_block.
struct TimingLog {
    std::vector<std::pair<std::string, double>> entries;

    double total(const std::string& label) const;
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Runs `thunk` and returns {result, seconds}, or just seconds for void thunks.
/// The duration is appended to `log` (when given) even if the thunk throws.
template <typename F>
auto time_block(const std::string& label, F&& thunk, TimingLog* log = nullptr) {
    Stopwatch sw;
    auto record = [&] {
        const double s = sw.seconds();
        if (log) log->entries.emplace_back(label, s);
        return s;
    };
    using R = std::invoke_result_t<F>;
    if constexpr (std::is_void_v<R>) {
        try {
            std::forward<F>(thunk)();
        } catch (...) {
            record();
            throw;
        }
        return record();
    } else {
        try {
            R result = std::forward<F>(thunk)();
            const double s = record();
            return std::pair<R, double>(std::move(result), s);
        } catch (...) {
            record();
            throw;
        }
    }
}

}  // namespace psim
