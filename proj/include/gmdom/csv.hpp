#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gmdom {

struct CsvRow {
  std::size_t line = 0;  // 1-based physical line of the record
  std::vector<std::string> fields;
};

/// Comma-separated table with a header row. Double-quoted fields may contain
/// commas and doubled quotes but not line breaks.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  std::optional<std::size_t> find_column(std::string_view name) const;
  /// Throws ConfigError naming the missing column.
  std::size_t column(std::string_view name) const;
};

/// Strips a UTF-8 BOM and CR line endings and skips blank lines. Throws
/// ParseError on unterminated quotes or a field count that differs from the
/// header.
CsvTable read_csv(std::istream& in);

/// Quotes a field when it contains a comma, quote or leading/trailing space.
std::string csv_escape(std::string_view field);

/// Strict decimal parse of a whole cell (surrounding spaces allowed). Throws
/// ParseError tagged with `line` on anything else, including inf and nan.
double parse_number(std::string_view cell, std::size_t line, std::string_view what);

}  // namespace gmdom
