#include "gmdom/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "gmdom/csv.hpp"
#include "gmdom/errors.hpp"

namespace gmdom {

namespace {

constexpr std::string_view kDrawsMagic = "# gmdom-draws 1";

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}' for reading", path.string()));
  return in;
}

std::string one_line(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c == '\n' || c == '\r') c = ' ';
  return out;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::size_t parse_count(std::string_view text, std::size_t line) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ParseError(fmt::format("cannot parse truncation level '{}'", text), line);
  return value;
}

}  // namespace

void PreprocessConfig::validate() const {
  if (!(deflator > 0.0) || !std::isfinite(deflator))
    throw ConfigError(fmt::format("deflator must be positive and finite, got {}", deflator));
  if (income_column.empty()) throw ConfigError("income column name is empty");
  if (equivalise && household_size_column.empty())
    throw ConfigError("equivalisation needs a household size column");
  if (group_column.empty() != group_value.empty())
    throw ConfigError("a group filter needs both a column name and a value");
}

double LoadReport::dropped_percent() const {
  return rows_in_group == 0 ? 0.0 : 100.0 * static_cast<double>(dropped_nonpositive) / rows_in_group;
}

LoadedSample parse_sample(std::istream& in, const PreprocessConfig& cfg, std::string label) {
  cfg.validate();
  const auto table = read_csv(in);
  const std::size_t income_col = table.column(cfg.income_column);
  std::optional<std::size_t> weight_col, size_col, group_col;
  if (!cfg.weight_column.empty()) weight_col = table.column(cfg.weight_column);
  if (cfg.equivalise) size_col = table.column(cfg.household_size_column);
  if (!cfg.group_column.empty()) group_col = table.column(cfg.group_column);

  LoadedSample out;
  out.sample.label = std::move(label);
  out.report.rows_read = table.rows.size();
  for (const auto& row : table.rows) {
    if (group_col && row.fields[*group_col] != cfg.group_value) continue;
    ++out.report.rows_in_group;
    double income = parse_number(row.fields[income_col], row.line, cfg.income_column);
    double weight = 1.0;
    if (weight_col) {
      weight = parse_number(row.fields[*weight_col], row.line, cfg.weight_column);
      if (!(weight > 0.0)) throw ParseError(fmt::format("weight must be positive, got {}", weight), row.line);
    }
    if (size_col) {
      const double persons = parse_number(row.fields[*size_col], row.line, cfg.household_size_column);
      if (!(persons >= 1.0)) throw ParseError(fmt::format("household size must be at least 1, got {}", persons), row.line);
      income /= std::sqrt(persons);
    }
    income /= cfg.deflator;
    if (!(income > 0.0)) {
      if (!cfg.drop_nonpositive)
        throw ParseError(fmt::format("non-positive income {} (dropping is disabled)", income), row.line);
      ++out.report.dropped_nonpositive;
      continue;
    }
    out.sample.incomes.push_back(income);
    out.sample.weights.push_back(weight);
  }
  if (out.sample.size() == 0) throw DataError("no usable observations after filtering");
  return out;
}

LoadedSample load_sample(const std::filesystem::path& path, const PreprocessConfig& cfg) {
  auto in = open_input(path);
  std::string label = path.stem().string();
  if (!cfg.group_column.empty()) label += fmt::format("[{}={}]", cfg.group_column, cfg.group_value);
  return parse_sample(in, cfg, std::move(label));
}

void write_draws(std::ostream& out, const PosteriorSample& sample) {
  std::string buffer;
  auto it = std::back_inserter(buffer);
  fmt::format_to(it, "{}\n# label {}\n# seed {}\n# config {}\n# draws {}\n", kDrawsMagic, one_line(sample.meta.label),
                 sample.meta.seed, one_line(sample.meta.config_digest), sample.size());
  for (const auto& d : sample.draws) {
    fmt::format_to(it, "{}", d.truncation());
    for (std::size_t k = 0; k < d.size(); ++k) {
      const auto& c = d.components()[k];
      fmt::format_to(it, " {:.17g} {:.17g} {:.17g}", d.weights()[k], c.shape, c.mean);
    }
    buffer += '\n';
  }
  out << buffer;
  if (!out) throw DataError("write error while saving draws");
}

PosteriorSample read_draws(std::istream& in) {
  PosteriorSample sample;
  std::optional<std::size_t> declared;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1) {
      if (line != kDrawsMagic) throw ParseError("not a draw file (missing header)", number);
      continue;
    }
    if (line.starts_with('#')) {
      std::string_view rest = std::string_view(line).substr(1);
      if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      const auto space = rest.find(' ');
      const auto key = rest.substr(0, space);
      const auto value = space == std::string_view::npos ? std::string_view{} : rest.substr(space + 1);
      if (key == "label") {
        sample.meta.label = std::string(value);
      } else if (key == "config") {
        sample.meta.config_digest = std::string(value);
      } else if (key == "seed") {
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), sample.meta.seed);
        if (ec != std::errc{} || ptr != value.data() + value.size()) throw ParseError("bad seed", number);
      } else if (key == "draws") {
        declared = parse_count(value, number);
      }
      continue;
    }
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    const std::size_t k = parse_count(tok[0], number);
    if (tok.size() != 1 + 3 * (k + 1))
      throw ParseError(fmt::format("K = {} needs {} numbers after it, found {}", k, 3 * (k + 1), tok.size() - 1),
                       number);
    std::vector<double> weights;
    std::vector<GammaComponent> comps;
    for (std::size_t j = 0; j <= k; ++j) {
      weights.push_back(parse_number(tok[1 + 3 * j], number, "weight"));
      const double shape = parse_number(tok[2 + 3 * j], number, "shape");
      const double mean = parse_number(tok[3 + 3 * j], number, "mean");
      comps.push_back({mean, shape});
    }
    try {
      sample.draws.emplace_back(std::move(weights), std::move(comps));
    } catch (const DomainError& e) {
      throw ParseError(e.what(), number);
    }
  }
  if (in.bad()) throw DataError("read error while loading draws");
  if (number == 0) throw ParseError("empty draw file", 1);
  if (declared && *declared != sample.size())
    throw ParseError(fmt::format("header declares {} draws but {} were read (truncated file?)", *declared,
                                 sample.size()),
                     number);
  return sample;
}

void save_draws(const PosteriorSample& sample, const std::filesystem::path& path) {
  std::ostringstream out;
  write_draws(out, sample);
  write_file_atomic(path, out.str());
}

PosteriorSample load_draws(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_draws(in);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(fmt::format("cannot open '{}' for writing", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw DataError(fmt::format("write error on '{}'", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError(fmt::format("cannot replace '{}'", path.string()));
  }
}

}  // namespace gmdom
