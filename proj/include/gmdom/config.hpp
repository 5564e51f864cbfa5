#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "gmdom/dominance.hpp"
#include "gmdom/dp_sampler.hpp"
#include "gmdom/grid.hpp"
#include "gmdom/io.hpp"

namespace gmdom {

/// Settings for one pairwise comparison.
struct CompareOptions {
  CurveKind kind = CurveKind::GLD;
  std::optional<double> u_min;  // missing bounds default to the grid ends
  std::optional<double> u_max;
  std::size_t reorderings = 1;  // 1: index pairing only
  std::uint64_t seed = 1;       // drives the reorderings

  /// Standard grid, restricted when either bound is set. Throws ConfigError
  /// on a bound outside (0, 1), u_min > u_max, or a range with no grid point.
  DominanceGrid grid() const;
  void validate() const;
};

/// Everything a config file can set. Command-line flags override it.
struct RunConfig {
  SamplerConfig sampler;
  PreprocessConfig preprocess;
  std::size_t replications = 10;  // bootstrap chains for weighted data
  CompareOptions compare;
};

/// Overlays a JSON document on `base`. Sections "sampler", "preprocess" and
/// "compare" mirror the structs field by field; "replications" is top level.
/// Unknown keys and wrongly typed values throw ConfigError.
RunConfig parse_run_config(std::string_view json_text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace gmdom
