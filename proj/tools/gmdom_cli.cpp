// Command-line front end: fit, compare, curve, summary, report.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gmdom/commands.hpp"
#include "gmdom/errors.hpp"

namespace fs = std::filesystem;
using namespace gmdom;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Flags shared by several subcommands; unset values leave the config alone.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations, burn_in, thin, replications, reorderings;
  std::optional<std::string> curve;
  std::optional<double> u_min, u_max, deflator;
  std::optional<std::string> income_column, weight_column, household_size_column, group;
  bool equivalise = false;
  bool keep_nonpositive = false;
};

void add_sampler_flags(CLI::App* app, Overrides& o) {
  app->add_option("--seed", o.seed, "Sampler seed");
  app->add_option("--iterations", o.iterations, "MCMC sweeps per chain, burn-in included");
  app->add_option("--burn-in", o.burn_in, "Sweeps discarded before retaining draws");
  app->add_option("--thin", o.thin, "Keep every n-th sweep after burn-in");
  app->add_option("--replications", o.replications, "Bootstrap chains for weighted data");
}

void add_preprocess_flags(CLI::App* app, Overrides& o) {
  app->add_option("--income-column", o.income_column, "Income column name (default: income)");
  app->add_option("--weight-column", o.weight_column, "Survey weight column; omit for unweighted data");
  app->add_option("--household-size-column", o.household_size_column, "Household size column for --equivalise");
  app->add_option("--group", o.group, "Keep only rows where column equals value")->type_name("NAME=VALUE");
  app->add_option("--deflator", o.deflator, "Price index ratio; incomes are divided by it");
  app->add_flag("--equivalise", o.equivalise, "Divide income by the square root of household size");
  app->add_flag("--keep-nonpositive", o.keep_nonpositive, "Fail on incomes <= 0 instead of dropping them");
}

void add_compare_flags(CLI::App* app, Overrides& o, bool with_kind, bool with_reorder) {
  if (with_kind) app->add_option("--curve", o.curve, "Curve kind: fsd, gld or ld");
  app->add_option("--u-min", o.u_min, "Lower end of the population range compared");
  app->add_option("--u-max", o.u_max, "Upper end of the population range compared");
  if (with_reorder) {
    app->add_option("--reorderings", o.reorderings, "Random reorderings of the second sample's draws");
    app->add_option("--seed", o.seed, "Seed for the reorderings");
  }
}

RunConfig resolve(const Overrides& o, bool sampler_seed) {
  RunConfig cfg;
  if (o.config) cfg = load_run_config(*o.config, cfg);
  if (o.seed) (sampler_seed ? cfg.sampler.seed : cfg.compare.seed) = *o.seed;
  if (o.iterations) cfg.sampler.iterations = *o.iterations;
  if (o.burn_in) cfg.sampler.burn_in = *o.burn_in;
  if (o.thin) cfg.sampler.thin = *o.thin;
  if (o.replications) cfg.replications = *o.replications;
  if (o.reorderings) cfg.compare.reorderings = *o.reorderings;
  if (o.curve) cfg.compare.kind = parse_curve_kind(*o.curve);
  if (o.u_min) cfg.compare.u_min = *o.u_min;
  if (o.u_max) cfg.compare.u_max = *o.u_max;
  auto& p = cfg.preprocess;
  if (o.income_column) p.income_column = *o.income_column;
  if (o.weight_column) p.weight_column = *o.weight_column;
  if (o.household_size_column) p.household_size_column = *o.household_size_column;
  if (o.deflator) p.deflator = *o.deflator;
  if (o.equivalise) p.equivalise = true;
  if (o.keep_nonpositive) p.drop_nonpositive = false;
  if (o.group) {
    const auto eq = o.group->find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(fmt::format("--group expects NAME=VALUE, got '{}'", *o.group));
    p.group_column = o.group->substr(0, eq);
    p.group_value = o.group->substr(eq + 1);
  }
  return cfg;
}

PosteriorSample load_labeled(const std::string& path) {
  auto s = load_draws(path);
  if (s.meta.label.empty()) s.meta.label = fs::path(path).stem().string();
  return s;
}

std::vector<PosteriorSample> load_all(const std::vector<std::string>& paths) {
  std::vector<PosteriorSample> out;
  for (const auto& p : paths) out.push_back(load_labeled(p));
  return out;
}

void emit(const std::string& content, const std::optional<std::string>& path) {
  if (path) {
    write_file_atomic(*path, content);
  } else {
    std::cout << content << std::flush;
  }
}

LoadedSample load_input(const std::string& path, const PreprocessConfig& cfg) {
  auto loaded = load_sample(path, cfg);
  const auto& r = loaded.report;
  std::cerr << fmt::format("read {} rows from {}", r.rows_read, path);
  if (!cfg.group_column.empty()) std::cerr << fmt::format(", {} in group {}={}", r.rows_in_group, cfg.group_column, cfg.group_value);
  std::cerr << fmt::format("; dropped {} non-positive incomes ({:.2f}%)\n", r.dropped_nonpositive, r.dropped_percent());
  return loaded;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian dominance analysis of income distributions with Dirichlet process gamma mixtures"};
  app.require_subcommand(1);
  Overrides o;
  std::string input;
  std::optional<std::string> output, label, curve_output, per_draw, input_opt;
  std::string format = "text";
  std::vector<std::string> draws;

  auto* fit = app.add_subcommand("fit", "Fit a posterior to a CSV sample and save its draws");
  fit->add_option("--input", input, "CSV file with a header row")->required();
  fit->add_option("--output", output, "Draw file to write")->required();
  fit->add_option("--label", label, "Label stored with the draws (default: input file name)");
  fit->add_option("--config", o.config, "JSON config file; flags override it");
  add_sampler_flags(fit, o);
  add_preprocess_flags(fit, o);

  auto* compare = app.add_subcommand("compare", "Dominance probabilities between two draw files");
  compare->add_option("draws", draws, "Two draw files: X then Y")->required()->expected(2);
  compare->add_option("--output", output, "Report file (default: standard output)");
  compare->add_option("--format", format, "text or csv");
  compare->add_option("--curve-output", curve_output, "Also write the probability curve as CSV");
  compare->add_option("--config", o.config, "JSON config file; flags override it");
  add_compare_flags(compare, o, true, true);

  auto* curve = app.add_subcommand("curve", "Probability curve Pr(X >= Y at u) as CSV");
  curve->add_option("draws", draws, "Two draw files: X then Y")->required()->expected(2);
  curve->add_option("--output", output, "Curve file (default: standard output)");
  curve->add_option("--config", o.config, "JSON config file; flags override it");
  add_compare_flags(curve, o, true, false);

  auto* summary = app.add_subcommand("summary", "Posterior mean and Gini summaries");
  summary->add_option("draws", draws, "Draw files");
  summary->add_option("--input", input_opt, "Also summarize a raw CSV sample with survey weights");
  summary->add_option("--output", output, "Report file (default: standard output)");
  summary->add_option("--format", format, "text or csv");
  summary->add_option("--per-draw", per_draw, "Write per-draw mean and Gini values as CSV");
  summary->add_option("--config", o.config, "JSON config file; flags override it");
  add_preprocess_flags(summary, o);

  auto* report = app.add_subcommand("report", "All pairwise comparisons, one table per curve kind");
  report->add_option("draws", draws, "Two or more draw files")->required()->expected(2, 1 << 20);
  report->add_option("--output", output, "Report file (default: standard output)");
  report->add_option("--format", format, "text or csv");
  report->add_option("--config", o.config, "JSON config file; flags override it");
  add_compare_flags(report, o, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (fit->parsed()) {
      const auto cfg = resolve(o, true);
      cfg.preprocess.validate();
      cfg.sampler.validate();
      auto loaded = load_input(input, cfg.preprocess);
      if (label) loaded.sample.label = *label;
      const bool weighted = !cfg.preprocess.weight_column.empty();
      const auto r = run_fit(loaded.sample, cfg, weighted);
      const auto& d = r.diagnostics;
      std::cerr << fmt::format("{} draws from {} ({}); mean K {:.2f}, shape acceptance {:.3f}\n", r.sample.size(),
                               weighted ? fmt::format("{} bootstrap chains", cfg.replications) : std::string("one chain"),
                               loaded.sample.label, d.mean_instantiated, d.acceptance_rate());
      for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
      save_draws(r.sample, *output);
    } else if (compare->parsed()) {
      const auto cfg = resolve(o, false);
      const auto fmt_ = parse_report_format(format);
      const auto x = load_labeled(draws[0]), y = load_labeled(draws[1]);
      const auto r = run_compare(x, y, cfg.compare);
      emit(render(r.tables, fmt_), output);
      if (curve_output) write_file_atomic(*curve_output, render_curve_csv(r.result.curve_x_over_y));
    } else if (curve->parsed()) {
      const auto cfg = resolve(o, false);
      cfg.compare.validate();
      const auto x = load_labeled(draws[0]), y = load_labeled(draws[1]);
      emit(render_curve_csv(probability_curve(x, y, cfg.compare.kind, cfg.compare.grid())), output);
    } else if (summary->parsed()) {
      const auto cfg = resolve(o, false);
      const auto fmt_ = parse_report_format(format);
      const auto samples = load_all(draws);
      std::optional<LoadedSample> raw;
      if (input_opt) raw = load_input(*input_opt, cfg.preprocess);
      const auto r = run_summary(samples, raw ? &raw->sample : nullptr);
      emit(render(r.tables, fmt_), output);
      if (per_draw) write_file_atomic(*per_draw, render_per_draw_csv(samples, r));
    } else if (report->parsed()) {
      const auto cfg = resolve(o, false);
      const auto fmt_ = parse_report_format(format);
      const auto samples = load_all(draws);
      emit(render(run_report(samples, cfg.compare), fmt_), output);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DomainError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
