#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "twosided/core.hpp"

namespace twosided::csv {

// Headerless, row-major, comma-separated, '.' decimal point, LF line endings.
// Buyers are rows, sellers are columns. Values are written in the shortest
// representation that round-trips exactly.

Matrix parse_matrix(std::string_view text);
std::string format_matrix(const Matrix& m);

/// A single row of 0/1 values.
AssignmentVector parse_assignment(std::string_view text);
std::string format_assignment(const AssignmentVector& v);

std::string format_double(double x);

OutcomeMatrix read_outcomes(const std::filesystem::path& path);
AssignmentVector read_assignment(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m);
void write_assignment(const std::filesystem::path& path, const AssignmentVector& v);

std::string read_file(const std::filesystem::path& path);

}  // namespace twosided::csv
