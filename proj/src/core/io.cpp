#include "io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "error.hpp"

namespace fs = std::filesystem;

namespace psim {

void write_file_atomic(const fs::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw io_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::random_device rd;
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw io_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw io_error("cannot rename onto " + path.string());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read failed for " + path.string());
    return ss.str();
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

namespace {

std::string quote(std::string_view cell) {
    if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
    std::string q = "\"";
    for (char c : cell) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    return q;
}

}  // namespace

void CsvWriter::header(std::initializer_list<std::string_view> names) {
    std::vector<std::string> v(names.begin(), names.end());
    header(v);
}

void CsvWriter::header(const std::vector<std::string>& names) { row_cells(names); }

void CsvWriter::row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) buf_ += ',';
        buf_ += format_double(v);
        first = false;
    }
    buf_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) buf_ += ',';
        buf_ += format_double(values[k]);
    }
    buf_ += '\n';
}

void CsvWriter::row_cells(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) buf_ += ',';
        buf_ += quote(cells[k]);
    }
    buf_ += '\n';
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return k;
    }
    throw validation_error("missing CSV column '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    const std::string& cell = rows.at(row).at(col);
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
    if (b < e && *b == '+') ++b;
    double v = 0.0;
    auto res = std::from_chars(b, e, v);
    if (b == e || res.ec != std::errc() || res.ptr != e) {
        throw validation_error("non-numeric value '" + cell + "' at row " + std::to_string(row + 1) +
                               ", column '" + header.at(col) + "'");
    }
    return v;
}

CsvTable parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string cell;
    bool in_quotes = false;
    bool cell_started = false;
    std::size_t i = 0;
    auto end_record = [&] {
        record.push_back(std::move(cell));
        cell.clear();
        records.push_back(std::move(record));
        record.clear();
        cell_started = false;
    };
    while (i < text.size()) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            cell_started = true;
        } else if (c == ',') {
            record.push_back(std::move(cell));
            cell.clear();
            cell_started = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (cell_started || !record.empty() || !cell.empty()) end_record();
        } else {
            cell += c;
            cell_started = true;
        }
        ++i;
    }
    if (in_quotes) throw parse_error("unterminated quoted CSV field");
    if (cell_started || !record.empty() || !cell.empty()) end_record();
    if (records.empty()) throw parse_error("CSV has no header row");

    CsvTable t;
    t.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != t.header.size()) {
            throw parse_error("CSV row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                              " cells, header has " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(records[r]));
    }
    return t;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_file(path)); }

}  // namespace psim
