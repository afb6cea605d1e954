/// @file io.hpp
/// @brief Atomic file output and a small RFC-4180-style CSV reader/writer.

#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace psim {

/// Writes `content` to a sibling temp file, then renames it over `path`.
/// Parent directories are created as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Shortest text that round-trips the double; negative zero prints as 0.
std::string format_double(double v);

class CsvWriter {
public:
    void header(std::initializer_list<std::string_view> names);
    void header(const std::vector<std::string>& names);
    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);
    /// Raw cells, quoted as needed.
    void row_cells(const std::vector<std::string>& cells);

    const std::string& str() const { return buf_; }
    void commit(const std::filesystem::path& path) const { write_file_atomic(path, buf_); }

private:
    std::string buf_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws a validation error naming the column if absent.
    std::size_t column(std::string_view name) const;
    /// Numeric cell; throws a validation error naming row and column if unparseable.
    double number(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace psim
