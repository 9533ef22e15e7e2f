#pragma once

#include "specgconv/linalg.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace specgconv::csv {

/// A parsed CSV file: header names plus rows of raw cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position of `name`, or -1.
    int column(const std::string& name) const;
};

Table read_table(const std::filesystem::path& path);
void write_table(const std::filesystem::path& path, const Table& table);

double parse_double(const std::string& cell, const std::filesystem::path& origin, std::size_t row);
long long parse_int(const std::string& cell, const std::filesystem::path& origin, std::size_t row);

/// 17 significant digits; reading the text back yields the same double.
std::string format_double(double value);

/// Numeric matrix with a header row `c0,c1,...`.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
void write_matrix(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& header);
Matrix read_matrix(const std::filesystem::path& path);

} // namespace specgconv::csv
