#include "gmdom/config.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>

#include <fmt/format.h>
#include <json.hpp>

#include "gmdom/errors.hpp"

namespace gmdom {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& section, std::string_view where, const char* key, T& dst) {
  try {
    const auto& v = section.at(key);
    // nlohmann would wrap negative integers into huge unsigned values.
    if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_unsigned())
        throw ConfigError(fmt::format("config {}.{}: expected a non-negative integer", where, key));
    }
    dst = v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config {}.{}: {}", where, key, e.what()));
  }
}

// Applies each key through `apply`, rejecting anything it does not handle.
template <typename Apply>
void each_key(const json& section, std::string_view where, Apply apply) {
  if (!section.is_object()) throw ConfigError(fmt::format("config section '{}' must be an object", where));
  for (const auto& [key, value] : section.items()) {
    if (!apply(key)) throw ConfigError(fmt::format("unknown config key '{}.{}'", where, key));
  }
}

void apply_sampler(const json& s, SamplerConfig& c) {
  each_key(s, "sampler", [&](const std::string& key) {
    const char* k = key.c_str();
    if (key == "iterations") read_field(s, "sampler", k, c.iterations);
    else if (key == "burn_in") read_field(s, "sampler", k, c.burn_in);
    else if (key == "thin") read_field(s, "sampler", k, c.thin);
    else if (key == "seed") read_field(s, "sampler", k, c.seed);
    else if (key == "prior_shape_a") read_field(s, "sampler", k, c.prior_shape_a);
    else if (key == "prior_shape_b") read_field(s, "sampler", k, c.prior_shape_b);
    else if (key == "prior_rate_a") read_field(s, "sampler", k, c.prior_rate_a);
    else if (key == "prior_rate_b") read_field(s, "sampler", k, c.prior_rate_b);
    else if (key == "scale_rate_prior_by_mean") read_field(s, "sampler", k, c.scale_rate_prior_by_mean);
    else if (key == "alpha_a") read_field(s, "sampler", k, c.alpha_a);
    else if (key == "alpha_b") read_field(s, "sampler", k, c.alpha_b);
    else if (key == "mh_step") read_field(s, "sampler", k, c.mh_step);
    else if (key == "max_components") read_field(s, "sampler", k, c.max_components);
    else return false;
    return true;
  });
}

void apply_preprocess(const json& s, PreprocessConfig& c) {
  each_key(s, "preprocess", [&](const std::string& key) {
    const char* k = key.c_str();
    if (key == "income_column") read_field(s, "preprocess", k, c.income_column);
    else if (key == "weight_column") read_field(s, "preprocess", k, c.weight_column);
    else if (key == "household_size_column") read_field(s, "preprocess", k, c.household_size_column);
    else if (key == "group_column") read_field(s, "preprocess", k, c.group_column);
    else if (key == "group_value") read_field(s, "preprocess", k, c.group_value);
    else if (key == "deflator") read_field(s, "preprocess", k, c.deflator);
    else if (key == "equivalise") read_field(s, "preprocess", k, c.equivalise);
    else if (key == "drop_nonpositive") read_field(s, "preprocess", k, c.drop_nonpositive);
    else return false;
    return true;
  });
}

void apply_compare(const json& s, CompareOptions& c) {
  each_key(s, "compare", [&](const std::string& key) {
    const char* k = key.c_str();
    if (key == "curve") {
      std::string name;
      read_field(s, "compare", k, name);
      c.kind = parse_curve_kind(name);
    } else if (key == "u_min" || key == "u_max") {
      double v = 0.0;
      read_field(s, "compare", k, v);
      (key == "u_min" ? c.u_min : c.u_max) = v;
    } else if (key == "reorderings") {
      read_field(s, "compare", k, c.reorderings);
    } else if (key == "seed") {
      read_field(s, "compare", k, c.seed);
    } else {
      return false;
    }
    return true;
  });
}

}  // namespace

DominanceGrid CompareOptions::grid() const {
  auto grid = DominanceGrid::standard();
  if (!u_min && !u_max) return grid;
  const double lo = u_min.value_or(grid.points().front());
  const double hi = u_max.value_or(grid.points().back());
  if (!(lo > 0.0 && lo < 1.0) || !(hi > 0.0 && hi < 1.0))
    throw ConfigError(fmt::format("--u-min/--u-max must lie in (0, 1), got [{}, {}]", lo, hi));
  if (lo > hi) throw ConfigError(fmt::format("--u-min {} exceeds --u-max {}", lo, hi));
  try {
    return grid.restricted(lo, hi);
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("range [{}, {}] selects no grid point: {}", lo, hi, e.what()));
  }
}

void CompareOptions::validate() const {
  if (reorderings == 0) throw ConfigError("reorderings must be at least 1");
  (void)grid();
}

RunConfig parse_run_config(std::string_view json_text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  each_key(doc, "config", [&](const std::string& key) {
    if (key == "sampler") apply_sampler(doc.at(key), base.sampler);
    else if (key == "preprocess") apply_preprocess(doc.at(key), base.preprocess);
    else if (key == "compare") apply_compare(doc.at(key), base.compare);
    else if (key == "replications") read_field(doc, "config", "replications", base.replications);
    else return false;
    return true;
  });
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str(), std::move(base));
}

}  // namespace gmdom
