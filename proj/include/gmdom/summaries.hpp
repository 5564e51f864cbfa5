#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gmdom/grid.hpp"
#include "gmdom/posterior.hpp"
#include "gmdom/survey_bootstrap.hpp"

namespace gmdom {

enum class Functional { Mean, Gini };

std::string_view to_string(Functional which);

/// Per-draw values of a functional with their moments. The standard
/// deviation uses the population denominator M.
struct PosteriorSummary {
  std::vector<double> per_draw;
  double mean = 0.0;
  double sd = 0.0;
};

/// Applies mixture_mean or gini to every draw. Gini needs the unrestricted grid.
PosteriorSummary posterior_functional(const PosteriorSample& sample, Functional which,
                                      const DominanceGrid& grid = DominanceGrid::standard());

/// Survey-weighted descriptive statistics of a raw sample.
struct WeightedStats {
  double mean = 0.0;
  double sd = 0.0;  // sqrt of the weighted second central moment
  double gini = 0.0;
  std::size_t n = 0;
  double total_weight = 0.0;
};

/// Gini by sorted cumulative shares, G = 1 − Σ p_i (S_{i−1} + S_i) / S_n.
WeightedStats weighted_stats(const WeightedSample& sample);

/// Posterior mean density (1/M) Σ_m pdf(draw_m, y) at each y.
std::vector<double> density_on_grid(const PosteriorSample& sample, std::span<const double> y_grid);

}  // namespace gmdom
