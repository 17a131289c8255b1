#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refcon::csv {

// A parsed CSV file. Row and column numbers reported in errors are 1-based,
// counting the header as row 1.
struct Table {
  std::string source;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 style: comma separated, double-quoted fields may contain commas,
// quotes ("") and newlines. Blank lines are skipped.
Table parse(std::string_view text, std::string source = "<memory>");
Table read(const std::filesystem::path& path);

// True for the two accepted encodings of a missing value: "" and "NA".
bool is_missing(std::string_view cell);

// Decimal or scientific notation. Throws ParseError naming file/row/column.
double to_double(std::string_view cell, const Table& table, std::size_t row,
                 std::size_t col);

std::optional<double> to_optional_double(std::string_view cell,
                                         const Table& table, std::size_t row,
                                         std::size_t col);

// Quotes a field when it contains a delimiter, quote or newline.
std::string escape(std::string_view field);

// Fixed 12 significant digits used for every numeric CSV cell; NaN is
// written as NA and infinities as inf / -inf.
std::string format_number(double v);

}  // namespace refcon::csv
