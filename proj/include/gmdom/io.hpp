#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "gmdom/posterior.hpp"
#include "gmdom/survey_bootstrap.hpp"

namespace gmdom {

/// Column mapping and income adjustments applied while reading a survey file.
struct PreprocessConfig {
  std::string income_column = "income";
  std::string weight_column;          // empty: every row has weight 1
  std::string household_size_column;  // required when equivalise is set
  std::string group_column;           // empty: no subgroup filter
  std::string group_value;
  double deflator = 1.0;  // price index relative to the base year
  bool equivalise = false;
  bool drop_nonpositive = true;

  /// Throws ConfigError on a non-positive deflator or inconsistent columns.
  void validate() const;
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_in_group = 0;
  std::size_t dropped_nonpositive = 0;
  /// Dropped rows as a percentage of rows_in_group.
  double dropped_percent() const;
};

struct LoadedSample {
  WeightedSample sample;
  LoadReport report;
};

/// Income is raw / sqrt(household size) when equivalising, then divided by
/// the deflator; rows that end up ≤ 0 are dropped and counted. Cells that do
/// not parse abort with a ParseError naming the line.
LoadedSample parse_sample(std::istream& in, const PreprocessConfig& cfg, std::string label);
LoadedSample load_sample(const std::filesystem::path& path, const PreprocessConfig& cfg);

/// One draw per line: K, then K+1 triples (weight shape mean) at 17
/// significant digits. Header lines begin with '#'.
void write_draws(std::ostream& out, const PosteriorSample& sample);
/// Throws ParseError with the offending line number.
PosteriorSample read_draws(std::istream& in);

void save_draws(const PosteriorSample& sample, const std::filesystem::path& path);
PosteriorSample load_draws(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace gmdom
