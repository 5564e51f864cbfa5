#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmdom/config.hpp"
#include "gmdom/dominance.hpp"
#include "gmdom/dp_sampler.hpp"
#include "gmdom/io.hpp"
#include "gmdom/report.hpp"
#include "gmdom/summaries.hpp"

namespace gmdom {

struct FitOutcome {
  PosteriorSample sample;
  SamplerDiagnostics diagnostics;
  bool weighted = false;  // true when the survey bootstrap was used
};

/// Weighted data (a weight column was named) go through the survey
/// bootstrap with cfg.replications chains; unweighted data run one chain.
FitOutcome run_fit(const WeightedSample& data, const RunConfig& cfg, bool weighted);

struct CompareOutcome {
  std::vector<ReportTable> tables;
  DominanceResult result;                   // index pairing
  std::optional<RandomizedBounds> bounds;  // when reorderings > 1
};

/// Three probabilities for x against y. With one reordering the index
/// pairing is reported; otherwise the average over reorderings is the
/// estimate, with minimum and maximum beside it.
CompareOutcome run_compare(const PosteriorSample& x, const PosteriorSample& y, const CompareOptions& options);

/// Two-column CSV (u, probability) of the probability curve.
std::string render_curve_csv(const ProbabilityCurve& curve);

/// All k(k−1)/2 pairs (i < j) per curve kind, one table per kind, each cell
/// computed exactly as run_compare would.
std::vector<ReportTable> run_report(std::span<const PosteriorSample> samples, const CompareOptions& options);

struct SummaryOutcome {
  std::vector<ReportTable> tables;
  std::vector<PosteriorSummary> means;
  std::vector<PosteriorSummary> ginis;
};

/// Posterior mean and Gini per sample, plus weighted statistics of raw data when given.
SummaryOutcome run_summary(std::span<const PosteriorSample> samples, const WeightedSample* raw = nullptr);

/// CSV with columns label, draw, mean, gini at 17 significant digits.
std::string render_per_draw_csv(std::span<const PosteriorSample> samples, const SummaryOutcome& summary);

}  // namespace gmdom
