#pragma once

// Minimal comma-separated reader for the flat numeric tables used here:
// no quoting, '#' comment lines and blank lines skipped, header required.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace quakestat::csv {

struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;

    /// Column index by name; throws ParseError naming the column.
    std::size_t column(std::string_view name) const;
};

/// Reads the header line and all data rows.  Every row must have as many
/// fields as the header.  When `required` is non-empty each listed column must
/// be present (order and extra columns are free).  Throws ParseError with the
/// 1-based line number.
Table read(std::istream& in, const std::vector<std::string>& required = {});

/// Strict decimal parse of a whole field; throws ParseError naming the line
/// and column.
double to_double(const Row& row, std::size_t col, std::string_view name);

std::vector<std::string> split(std::string_view line, char sep = ',');

}  // namespace quakestat::csv
