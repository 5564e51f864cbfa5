#include "gmdom/commands.hpp"

#include <fmt/format.h>

#include "gmdom/csv.hpp"
#include "gmdom/errors.hpp"
#include "gmdom/survey_bootstrap.hpp"

namespace gmdom {

namespace {

std::string kind_title(CurveKind kind) {
  switch (kind) {
    case CurveKind::FSD: return "First-order stochastic dominance (FSD)";
    case CurveKind::GLD: return "Generalized Lorenz dominance (GLD)";
    case CurveKind::LD: return "Lorenz dominance (LD)";
  }
  return "";
}

std::string upper(CurveKind kind) {
  std::string s(to_string(kind));
  for (auto& c : s) c = static_cast<char>(c - 'a' + 'A');
  return s;
}

std::string label_or(const PosteriorSample& s, std::string_view fallback) {
  return s.meta.label.empty() ? std::string(fallback) : s.meta.label;
}

std::string grid_note(const DominanceGrid& grid) {
  const auto pts = grid.points();
  if (!grid.is_restricted())
    return fmt::format("grid: {} points, {} <= u <= {}", pts.size(), pts.front(), pts.back());
  const auto& r = *grid.restriction();
  return fmt::format("grid restricted to {} <= u <= {}: {} of {} points", r.lower, r.upper, grid.active_size(),
                     pts.size());
}

std::string reorder_note(const CompareOptions& o, std::string_view who) {
  return fmt::format("estimates average {} random reorderings of {}'s draws (seed {})", o.reorderings, who, o.seed);
}

struct PairEstimate {
  DominanceResult index;
  std::optional<RandomizedBounds> bounds;

  double x_over_y() const { return bounds ? bounds->x_over_y.avg : index.p_x_over_y; }
  double y_over_x() const { return bounds ? bounds->y_over_x.avg : index.p_y_over_x; }
  double neither() const { return bounds ? bounds->neither.avg : index.p_neither; }
};

PairEstimate estimate(const CurveTable& x, const CurveTable& y, const CompareOptions& o, const DominanceGrid& grid) {
  PairEstimate e{dominance_probabilities(x, y, o.kind, grid), std::nullopt};
  if (o.reorderings > 1) e.bounds = randomized_bounds(x, y, o.kind, grid, o.reorderings, o.seed);
  return e;
}

}  // namespace

FitOutcome run_fit(const WeightedSample& data, const RunConfig& cfg, bool weighted) {
  cfg.sampler.validate();
  data.validate();
  FitOutcome out;
  out.weighted = weighted;
  FitResult r = weighted ? fit_weighted_with_diagnostics(data, cfg.sampler, cfg.replications)
                         : fit_with_diagnostics(data.incomes, cfg.sampler, data.label);
  out.sample = std::move(r.sample);
  out.diagnostics = std::move(r.diagnostics);
  return out;
}

CompareOutcome run_compare(const PosteriorSample& x, const PosteriorSample& y, const CompareOptions& options) {
  options.validate();
  if (x.empty() || y.empty()) throw DataError("compare: a draw file holds no draws");
  const auto grid = options.grid();
  const CurveTable tx(x, grid, {options.kind}), ty(y, grid, {options.kind});
  const auto e = estimate(tx, ty, options, grid);

  const auto a = label_or(x, "X"), b = label_or(y, "Y");
  const auto k = upper(options.kind);
  ReportTable t;
  t.title = fmt::format("{}: {} vs {}", kind_title(options.kind), a, b);
  t.stub = "Probability";
  t.probabilities = true;
  const std::vector<std::string> rows{fmt::format("Pr({} >={} {})", a, k, b), fmt::format("Pr({} >={} {})", b, k, a),
                                      "Pr(neither dominates)"};
  if (e.bounds) {
    t.columns = {"Minimum", "Average", "Maximum"};
    const auto& bd = *e.bounds;
    for (std::size_t i = 0; i < 3; ++i) {
      const Bounds& v = i == 0 ? bd.x_over_y : i == 1 ? bd.y_over_x : bd.neither;
      t.rows.push_back({rows[i], {v.min, v.avg, v.max}});
    }
  } else {
    t.columns = {"Estimate"};
    t.rows = {{rows[0], {e.x_over_y()}}, {rows[1], {e.y_over_x()}}, {rows[2], {e.neither()}}};
  }
  t.footnotes.push_back(fmt::format("M = {} paired draws ({} has {}, {} has {})", e.index.m_used, a, x.size(), b,
                                    y.size()));
  t.footnotes.push_back(grid_note(grid));
  t.footnotes.push_back(fmt::format("draw pairs tied at every grid point under index pairing: {}", e.index.tie_count));
  if (e.index.tie_count > 0)
    t.footnotes.push_back("tied pairs count toward both directions; Pr(neither) is clamped at 0");
  if (e.bounds) t.footnotes.push_back(reorder_note(options, b));

  CompareOutcome out;
  out.tables.push_back(std::move(t));
  out.result = e.index;
  out.bounds = e.bounds;
  return out;
}

std::string render_curve_csv(const ProbabilityCurve& curve) {
  std::string out = "u,probability\n";
  auto it = std::back_inserter(out);
  for (std::size_t i = 0; i < curve.u.size(); ++i) fmt::format_to(it, "{},{:.6f}\n", curve.u[i], curve.values[i]);
  return out;
}

std::vector<ReportTable> run_report(std::span<const PosteriorSample> samples, const CompareOptions& options) {
  options.validate();
  if (samples.size() < 2) throw ConfigError("report needs at least two draw files");
  for (const auto& s : samples)
    if (s.empty()) throw DataError("report: a draw file holds no draws");
  const auto grid = options.grid();

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < samples.size(); ++i) labels.push_back(label_or(samples[i], fmt::format("S{}", i + 1)));

  // All kinds share one curve evaluation per draw unless that would hold
  // more than kTableBudget bytes; then one kind is evaluated at a time.
  constexpr double kTableBudget = 1.5e9;
  double bytes = 0.0;
  for (const auto& s : samples) bytes += 3.0 * 8.0 * static_cast<double>(s.size() * grid.points().size());
  const bool all_at_once = bytes <= kTableBudget;
  std::vector<CurveTable> curves;
  auto build = [&](std::initializer_list<CurveKind> kinds) {
    curves.clear();
    curves.reserve(samples.size());
    for (const auto& s : samples) curves.emplace_back(s, grid, kinds);
  };
  if (all_at_once) build({CurveKind::FSD, CurveKind::GLD, CurveKind::LD});

  std::vector<ReportTable> tables;
  for (auto kind : kAllCurveKinds) {
    CompareOptions o = options;
    o.kind = kind;
    if (!all_at_once) build({kind});

    ReportTable t;
    t.title = kind_title(kind);
    t.stub = "First vs second";
    const auto k = upper(kind);
    t.columns = {fmt::format("Pr(first >={} second)", k), fmt::format("Pr(second >={} first)", k),
                 "Pr(neither dominates)"};
    t.probabilities = true;
    std::vector<std::string> ties;
    std::size_t m_min = SIZE_MAX, m_max = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (std::size_t j = i + 1; j < samples.size(); ++j) {
        const auto e = estimate(curves[i], curves[j], o, grid);
        t.rows.push_back({fmt::format("{} vs {}", labels[i], labels[j]), {e.x_over_y(), e.y_over_x(), e.neither()}});
        m_min = std::min(m_min, e.index.m_used);
        m_max = std::max(m_max, e.index.m_used);
        if (e.index.tie_count > 0)
          ties.push_back(fmt::format("{} vs {}: {}", labels[i], labels[j], e.index.tie_count));
      }
    }
    t.footnotes.push_back(m_min == m_max ? fmt::format("M = {} paired draws per comparison", m_min)
                                         : fmt::format("M = {} to {} paired draws per comparison", m_min, m_max));
    t.footnotes.push_back(grid_note(grid));
    if (ties.empty()) {
      t.footnotes.push_back("no draw pairs tied at every grid point");
    } else {
      std::string list;
      for (const auto& s : ties) list += (list.empty() ? "" : "; ") + s;
      t.footnotes.push_back(fmt::format("draw pairs tied at every grid point (counted both ways, Pr(neither) clamped "
                                        "at 0): {}",
                                        list));
    }
    if (o.reorderings > 1) t.footnotes.push_back(reorder_note(o, "the second sample"));
    tables.push_back(std::move(t));
  }
  return tables;
}

SummaryOutcome run_summary(std::span<const PosteriorSample> samples, const WeightedSample* raw) {
  if (samples.empty() && raw == nullptr) throw ConfigError("summary needs a draw file or an input sample");
  SummaryOutcome out;
  if (!samples.empty()) {
    ReportTable t;
    t.title = "Posterior means (standard deviations) of mean income and the Gini coefficient";
    t.stub = "Sample";
    t.columns = {"Mean income", "(sd)", "Gini", "(sd)"};
    std::size_t m_min = SIZE_MAX, m_max = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      out.means.push_back(posterior_functional(samples[i], Functional::Mean));
      out.ginis.push_back(posterior_functional(samples[i], Functional::Gini));
      const auto& mu = out.means.back();
      const auto& g = out.ginis.back();
      t.rows.push_back({label_or(samples[i], fmt::format("S{}", i + 1)), {mu.mean, mu.sd, g.mean, g.sd}});
      m_min = std::min(m_min, samples[i].size());
      m_max = std::max(m_max, samples[i].size());
    }
    t.footnotes.push_back(m_min == m_max ? fmt::format("M = {} draws per sample", m_min)
                                         : fmt::format("M = {} to {} draws per sample", m_min, m_max));
    t.footnotes.push_back("standard deviations use the population denominator M");
    t.footnotes.push_back("Gini per draw: trapezoid rule on the 999-point grid plus u = 0 and u = 1");
    out.tables.push_back(std::move(t));
  }
  if (raw != nullptr) {
    const auto s = weighted_stats(*raw);
    ReportTable t;
    t.title = "Weighted sample statistics";
    t.stub = "Sample";
    t.columns = {"Mean income", "sd", "Gini"};
    t.rows.push_back({raw->label.empty() ? "input" : raw->label, {s.mean, s.sd, s.gini}});
    t.footnotes.push_back(fmt::format("n = {} observations, total weight {:.6f}", s.n, s.total_weight));
    t.footnotes.push_back("Gini by sorted cumulative income shares");
    out.tables.push_back(std::move(t));
  }
  return out;
}

std::string render_per_draw_csv(std::span<const PosteriorSample> samples, const SummaryOutcome& summary) {
  std::string out = "label,draw,mean,gini\n";
  auto it = std::back_inserter(out);
  for (std::size_t i = 0; i < samples.size() && i < summary.means.size(); ++i) {
    const auto label = csv_escape(label_or(samples[i], fmt::format("S{}", i + 1)));
    for (std::size_t m = 0; m < summary.means[i].per_draw.size(); ++m)
      fmt::format_to(it, "{},{},{:.17g},{:.17g}\n", label, m, summary.means[i].per_draw[m],
                     summary.ginis[i].per_draw[m]);
  }
  return out;
}

}  // namespace gmdom
