#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ineq::csv {

struct Row {
  std::size_t line = 0;  // 1-based line in the source
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  // Index of a header column, matched case-insensitively after trimming.
  std::optional<std::size_t> column(std::string_view name) const;
};

// Reads comma-separated text with a header row. Fields may be double-quoted
// (RFC 4180 style, "" escapes a quote). Blank lines are skipped. Throws
// FormatError, tagged with `source` and the line number, when a row has a
// different field count than the header or a quote is left open.
Table read(std::istream& in, std::string_view source);

// Strict numeric parse: surrounding whitespace allowed, nothing else.
std::optional<double> parse_double(std::string_view text);

std::string trim(std::string_view text);

// Shortest round-trip decimal representation, '.' separator.
std::string format_number(double value);

// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

}  // namespace ineq::csv
