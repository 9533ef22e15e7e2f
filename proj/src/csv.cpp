#include "specgconv/csv.hpp"

#include "specgconv/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace specgconv::csv {
namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

} // namespace

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    Table table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    if (!have_header) throw io_error(path.string() + " is empty (a header row is required)");
    return table;
}

void write_table(const std::filesystem::path& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) emit(row);
    if (!out) throw io_error("write failed for " + path.string());
}

double parse_double(const std::string& cell, const std::filesystem::path& origin, std::size_t row) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw io_error(origin.string() + ": row " + std::to_string(row + 1) + ": '" + cell + "' is not a number");
    }
    return value;
}

long long parse_int(const std::string& cell, const std::filesystem::path& origin, std::size_t row) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw io_error(origin.string() + ": row " + std::to_string(row + 1) + ": '" + cell + "' is not an integer");
    }
    return value;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    std::vector<std::string> header;
    for (Index j = 0; j < m.cols(); ++j) header.push_back("c" + std::to_string(j));
    write_matrix(path, m, header);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& header) {
    if (static_cast<Index>(header.size()) != m.cols()) throw invalid_argument("header width does not match matrix");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed for " + path.string());
}

Matrix read_matrix(const std::filesystem::path& path) {
    const Table t = read_table(path);
    const auto cols = static_cast<Index>(t.header.size());
    Matrix m(static_cast<Index>(t.rows.size()), cols);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (static_cast<Index>(t.rows[i].size()) != cols) {
            throw io_error(path.string() + ": row " + std::to_string(i + 1) + " has " + std::to_string(t.rows[i].size()) +
                           " cells, expected " + std::to_string(cols));
        }
        for (Index j = 0; j < cols; ++j) m(static_cast<Index>(i), j) = parse_double(t.rows[i][j], path, i);
    }
    return m;
}

} // namespace specgconv::csv
