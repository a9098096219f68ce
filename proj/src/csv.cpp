#include "twosided/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "twosided/error.hpp"

namespace twosided::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string location(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

}  // namespace

Matrix parse_matrix(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError("empty matrix", 0, 0);
    std::size_t cols = 0;
    std::vector<double> data;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        std::string_view line = lines[r];
        if (trim(line).empty()) throw ParseError(location(r + 1, 1) + ": empty line", r + 1, 1);
        std::size_t c = 0;
        std::size_t pos = 0;
        for (;;) {
            const std::size_t comma = line.find(',', pos);
            const std::string_view field =
                trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
            ++c;
            double value = 0.0;
            const char* first = field.data();
            const char* last = field.data() + field.size();
            if (!field.empty() && *first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (field.empty() || ec != std::errc() || ptr != last)
                throw ParseError(location(r + 1, c) + ": invalid number '" + std::string(field) + "'", r + 1, c);
            if (!std::isfinite(value))
                throw ParseError(location(r + 1, c) + ": non-finite value '" + std::string(field) + "'", r + 1, c);
            data.push_back(value);
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        if (r == 0) {
            cols = c;
        } else if (c != cols) {
            throw ParseError(location(r + 1, std::min(c, cols) + 1) + ": expected " + std::to_string(cols) +
                                 " fields, found " + std::to_string(c),
                             r + 1, std::min(c, cols) + 1);
        }
    }
    return Matrix(lines.size(), cols, std::move(data));
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string format_matrix(const Matrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

AssignmentVector parse_assignment(std::string_view text) {
    const Matrix m = parse_matrix(text);
    if (m.rows() != 1 && m.cols() != 1)
        throw ParseError("assignment must be a single row or a single column, got " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()),
                         0, 0);
    std::vector<std::uint8_t> bits;
    bits.reserve(m.data().size());
    for (std::size_t idx = 0; idx < m.data().size(); ++idx) {
        const double v = m.data()[idx];
        const std::size_t row = m.rows() == 1 ? 1 : idx + 1;
        const std::size_t col = m.rows() == 1 ? idx + 1 : 1;
        if (v != 0.0 && v != 1.0)
            throw ParseError(location(row, col) + ": assignment entries must be 0 or 1, got " + format_double(v), row,
                             col);
        bits.push_back(v == 1.0 ? 1 : 0);
    }
    return AssignmentVector(std::move(bits));
}

std::string format_assignment(const AssignmentVector& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i] ? '1' : '0';
    }
    out += '\n';
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

template <class F>
auto with_path(const std::filesystem::path& path, F&& parse) {
    try {
        return parse(read_file(path));
    } catch (const ParseError& e) {
        if (e.row() == 0 && std::string_view(e.what()).starts_with("cannot open")) throw;
        throw ParseError(path.string() + ": " + e.what(), e.row(), e.column());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace

OutcomeMatrix read_outcomes(const std::filesystem::path& path) {
    return with_path(path, [](const std::string& t) { return OutcomeMatrix(parse_matrix(t)); });
}

AssignmentVector read_assignment(const std::filesystem::path& path) {
    return with_path(path, [](const std::string& t) { return parse_assignment(t); });
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) { write_text(path, format_matrix(m)); }

void write_assignment(const std::filesystem::path& path, const AssignmentVector& v) {
    write_text(path, format_assignment(v));
}

}  // namespace twosided::csv
