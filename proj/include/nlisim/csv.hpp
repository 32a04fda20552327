#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "nlisim/errors.hpp"
#include "nlisim/spectral.hpp"

namespace nlisim::csv {

/// Shortest decimal form that parses back to the same double.
inline std::string format(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

inline double parse(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw Error("csv: bad number '" + s + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

/// Matrix with a header row (column axis) and a leading column (row axis).
/// The top-left cell holds corner_label.
struct AxisMatrix {
    std::vector<double> row_axis;
    std::vector<double> col_axis;
    RealMatrix values;
};

inline void write_matrix(const std::filesystem::path& path, const std::string& corner_label,
                         const std::vector<double>& row_axis, const std::vector<double>& col_axis,
                         const RealMatrix& values) {
    if (static_cast<std::size_t>(values.rows()) != row_axis.size() ||
        static_cast<std::size_t>(values.cols()) != col_axis.size())
        throw InvalidArgument("write_matrix: axis length mismatch");
    auto out = open_out(path);
    out << corner_label;
    for (double c : col_axis) out << ',' << format(c);
    out << '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        out << format(row_axis[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < values.cols(); ++c) out << ',' << format(values(r, c));
        out << '\n';
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline AxisMatrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::string line;
    AxisMatrix m;
    if (!std::getline(in, line)) throw Error("empty csv '" + path.string() + "'");
    const auto header = split(line);
    for (std::size_t k = 1; k < header.size(); ++k) m.col_axis.push_back(parse(header[k]));
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != m.col_axis.size() + 1) throw Error("ragged csv '" + path.string() + "'");
        m.row_axis.push_back(parse(cells[0]));
        std::vector<double>& r = rows.emplace_back();
        for (std::size_t k = 1; k < cells.size(); ++k) r.push_back(parse(cells[k]));
    }
    m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.col_axis.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline void write_table(const std::filesystem::path& path, const Table& t) {
    auto out = open_out(path);
    for (std::size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
    out << '\n';
    for (const auto& r : t.rows) {
        if (r.size() != t.header.size()) throw InvalidArgument("write_table: row width mismatch");
        for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << format(r[k]);
        out << '\n';
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw Error("empty csv '" + path.string() + "'");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size()) throw Error("ragged csv '" + path.string() + "'");
        auto& r = t.rows.emplace_back();
        for (const auto& c : cells) r.push_back(parse(c));
    }
    return t;
}

} // namespace nlisim::csv
