#include "gmdom/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmdom/errors.hpp"
#include "gmdom/gamma_mixture.hpp"
#include "gmdom/parallel.hpp"

namespace gmdom {

std::string_view to_string(Functional which) { return which == Functional::Mean ? "mean" : "gini"; }

PosteriorSummary posterior_functional(const PosteriorSample& sample, Functional which, const DominanceGrid& grid) {
  if (sample.empty()) throw DomainError("posterior_functional: empty posterior sample");
  if (which == Functional::Gini && grid.is_restricted())
    throw DomainError("posterior_functional: Gini requires the unrestricted grid");
  PosteriorSummary out;
  out.per_draw.resize(sample.size());
  detail::parallel_for(sample.size(), [&](std::size_t m) {
    const auto& d = sample.draws[m];
    out.per_draw[m] = which == Functional::Mean ? mixture_mean(d) : gini(d, grid);
  });
  const double n = static_cast<double>(sample.size());
  // Shifted by the first value so identical draws give sd exactly 0.
  const double shift = out.per_draw.front();
  double offset = 0.0;
  for (double v : out.per_draw) offset += v - shift;
  out.mean = shift + offset / n;
  double ss = 0.0;
  for (double v : out.per_draw) ss += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(ss / n);
  return out;
}

WeightedStats weighted_stats(const WeightedSample& sample) {
  if (sample.size() == 0) throw DomainError("weighted_stats: empty sample");
  sample.validate();
  const auto& y = sample.incomes;
  const auto& w = sample.weights;
  const std::size_t n = y.size();

  WeightedStats out;
  out.n = n;
  out.total_weight = sample.total_weight();
  const double total = out.total_weight;

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += w[i] * y[i];
  mean /= total;
  double second = 0.0;
  for (std::size_t i = 0; i < n; ++i) second += w[i] * (y[i] - mean) * (y[i] - mean);
  out.mean = mean;
  out.sd = std::sqrt(second / total);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  // Unnormalized shares; the common factor 1 / Σw cancels in the ratio.
  double cum = 0.0, acc = 0.0;
  for (std::size_t i : order) {
    const double next = cum + w[i] * y[i];
    acc += w[i] * (cum + next);
    cum = next;
  }
  out.gini = std::max(0.0, 1.0 - acc / (total * cum));
  return out;
}

std::vector<double> density_on_grid(const PosteriorSample& sample, std::span<const double> y_grid) {
  if (sample.empty()) throw DomainError("density_on_grid: empty posterior sample");
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    if (!(y_grid[i] > 0.0) || !std::isfinite(y_grid[i]))
      throw DomainError("density_on_grid: grid values must be positive and finite");
    if (i > 0 && !(y_grid[i] > y_grid[i - 1])) throw DomainError("density_on_grid: grid must be strictly increasing");
  }
  std::vector<double> out(y_grid.size(), 0.0);
  detail::parallel_for(y_grid.size(), [&](std::size_t i) {
    double total = 0.0;
    for (const auto& d : sample.draws) total += pdf(d, y_grid[i]);
    out[i] = total / static_cast<double>(sample.size());
  });
  return out;
}

}  // namespace gmdom
