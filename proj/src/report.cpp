#include "gmdom/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gmdom/csv.hpp"
#include "gmdom/errors.hpp"

namespace gmdom {

namespace {

std::string cell(double v, int decimals) {
  auto s = fmt::format("{:.{}f}", v, decimals);
  // Avoid printing "-0.000000" for tiny negative rounding noise.
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "text") return ReportFormat::Text;
  if (text == "csv") return ReportFormat::Csv;
  throw ConfigError(fmt::format("unknown report format '{}' (expected text or csv)", text));
}

void ReportTable::validate() const {
  for (const auto& r : rows) {
    if (r.cells.size() != columns.size())
      throw DomainError(fmt::format("report row '{}' has {} cells for {} columns", r.label, r.cells.size(),
                                    columns.size()));
    for (double v : r.cells) {
      if (!std::isfinite(v)) throw DomainError(fmt::format("report row '{}' has a non-finite cell", r.label));
      if (probabilities && (v < 0.0 || v > 1.0))
        throw DomainError(fmt::format("report row '{}' has probability {} outside [0, 1]", r.label, v));
    }
  }
}

std::string render_text(const ReportTable& table) {
  table.validate();
  std::vector<std::vector<std::string>> body;
  std::size_t stub_width = table.stub.size();
  std::vector<std::size_t> widths;
  for (const auto& c : table.columns) widths.push_back(c.size());
  for (const auto& r : table.rows) {
    stub_width = std::max(stub_width, r.label.size());
    auto& cells = body.emplace_back();
    for (std::size_t j = 0; j < r.cells.size(); ++j) {
      cells.push_back(cell(r.cells[j], table.decimals));
      widths[j] = std::max(widths[j], cells.back().size());
    }
  }
  std::size_t total = stub_width;
  for (auto w : widths) total += 2 + w;

  std::string out;
  auto it = std::back_inserter(out);
  if (!table.title.empty()) fmt::format_to(it, "{}\n", table.title);
  const std::string rule(total, '-');
  fmt::format_to(it, "{}\n{:<{}}", rule, table.stub, stub_width);
  for (std::size_t j = 0; j < widths.size(); ++j) fmt::format_to(it, "  {:>{}}", table.columns[j], widths[j]);
  fmt::format_to(it, "\n{}\n", rule);
  for (std::size_t i = 0; i < body.size(); ++i) {
    fmt::format_to(it, "{:<{}}", table.rows[i].label, stub_width);
    for (std::size_t j = 0; j < widths.size(); ++j) fmt::format_to(it, "  {:>{}}", body[i][j], widths[j]);
    out += '\n';
  }
  fmt::format_to(it, "{}\n", rule);
  for (const auto& f : table.footnotes) fmt::format_to(it, "  {}\n", f);
  return out;
}

std::string render_csv(const ReportTable& table) {
  table.validate();
  std::string out;
  auto it = std::back_inserter(out);
  if (!table.title.empty()) fmt::format_to(it, "# {}\n", table.title);
  out += csv_escape(table.stub);
  for (const auto& c : table.columns) out += "," + csv_escape(c);
  out += '\n';
  for (const auto& r : table.rows) {
    out += csv_escape(r.label);
    for (double v : r.cells) out += "," + cell(v, table.decimals);
    out += '\n';
  }
  for (const auto& f : table.footnotes) fmt::format_to(it, "# {}\n", f);
  return out;
}

std::string render(std::span<const ReportTable> tables, ReportFormat format) {
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i > 0) out += '\n';
    out += format == ReportFormat::Text ? render_text(tables[i]) : render_csv(tables[i]);
  }
  return out;
}

}  // namespace gmdom
