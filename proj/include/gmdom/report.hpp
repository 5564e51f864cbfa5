#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gmdom {

enum class ReportFormat { Text, Csv };

/// Parses "text" or "csv"; throws ConfigError.
ReportFormat parse_report_format(std::string_view text);

/// Labeled grid of numbers printed with a fixed number of decimals.
struct ReportTable {
  struct Row {
    std::string label;
    std::vector<double> cells;
  };

  std::string title;
  std::string stub;  // heading of the row-label column
  std::vector<std::string> columns;
  std::vector<Row> rows;
  std::vector<std::string> footnotes;
  int decimals = 6;
  bool probabilities = false;  // cells restricted to [0, 1]

  /// Throws DomainError on ragged rows or out-of-range probabilities.
  void validate() const;
};

/// Aligned plain text: title, rule, header, rows, rule, footnotes.
std::string render_text(const ReportTable& table);
/// Header row then data rows; title and footnotes become '#' lines.
std::string render_csv(const ReportTable& table);
/// Tables separated by a blank line.
std::string render(std::span<const ReportTable> tables, ReportFormat format);

}  // namespace gmdom
