#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gmdom/dp_sampler.hpp"

namespace gmdom {

/// Positive incomes with positive sampling weights.
struct WeightedSample {
  std::vector<double> incomes;
  std::vector<double> weights;
  std::string label;

  /// Throws DomainError on mismatched lengths or non-positive values.
  void validate() const;
  std::size_t size() const noexcept { return incomes.size(); }
  double total_weight() const;
  /// N = round(Σ w).
  std::size_t population_size() const;
};

struct UrnPopulation {
  std::vector<std::size_t> counts;  // copies of each sample unit, summing to N
  std::size_t clamped_units = 0;    // units with w < 1 whose urn mass was clamped to 0
};

/// Weighted finite-population Bayesian bootstrap (Pólya urn).
///
/// Each of the n units is seeded once; the remaining N − n slots are filled
/// one at a time, picking unit i with probability proportional to
/// (w_i − 1) + l_i (N − n) / n, where l_i counts earlier urn picks of unit i.
UrnPopulation synthetic_population_counts(const WeightedSample& sample, std::uint64_t seed);

/// Incomes of the synthetic population: the n seeded units in sample order,
/// then the urn picks in draw order.
std::vector<double> synthetic_population(const WeightedSample& sample, std::uint64_t seed);

/// Simple random sample of size m without replacement from the synthetic
/// population built with the same seed. Throws DomainError if m > N.
std::vector<double> pseudo_sample(const WeightedSample& sample, std::size_t m, std::uint64_t seed);

/// Fits B chains, one per pseudo sample of size n, each keeping
/// ceil(M / B) draws where M = config.retained(), and concatenates them in
/// replication order. Chains run concurrently.
FitResult fit_weighted_with_diagnostics(const WeightedSample& sample, const SamplerConfig& config,
                                        std::size_t replications);
PosteriorSample fit_weighted(const WeightedSample& sample, const SamplerConfig& config, std::size_t replications);

/// Seed for an independent stream: replication `index` of stream `tag`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index);

}  // namespace gmdom
