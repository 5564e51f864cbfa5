#pragma once

#include <boost/random/mersenne_twister.hpp>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmdom/posterior.hpp"

namespace gmdom {

using Rng = boost::random::mt19937_64;

/// MCMC settings and priors for the Dirichlet-process gamma mixture.
///
/// Components are sampled as (shape v, rate β) with v ~ Gamma(prior_shape_a,
/// prior_shape_b) and β ~ Gamma(prior_rate_a, prior_rate_b), both in
/// shape/rate form. When scale_rate_prior_by_mean is set the rate prior's
/// rate becomes prior_rate_b times the sample mean, which makes the prior
/// equivariant to the income unit.
struct SamplerConfig {
  std::size_t iterations = 15'000;
  std::size_t burn_in = 5'000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  double prior_shape_a = 2.0;
  double prior_shape_b = 0.25;
  double prior_rate_a = 2.0;
  double prior_rate_b = 2.0;
  bool scale_rate_prior_by_mean = true;
  double alpha_a = 2.0;
  double alpha_b = 1.0;
  double mh_step = 0.1;
  std::size_t max_components = 200;

  /// Throws ConfigError when an invariant fails.
  void validate() const;
  std::size_t retained() const { return (iterations - burn_in) / thin; }
  /// Stable hex digest of every field, recorded in PosteriorMeta.
  std::string digest() const;
};

struct ComponentState {
  double shape;
  double rate;
};

/// Slice-sampler state. Sticks and components are instantiated up to
/// sticks.size(); every allocation points at an instantiated component.
struct LatentState {
  std::vector<std::size_t> allocations;
  std::vector<double> slices;
  std::vector<double> sticks;
  double concentration = 1.0;
  std::vector<ComponentState> components;

  /// w_k = V_k Π_{j<k} (1 − V_j) for the instantiated sticks.
  std::vector<double> weights() const;
  /// Π_k (1 − V_k): the mass not covered by instantiated sticks.
  double residual_weight() const;
  std::vector<std::size_t> counts() const;
};

// Conditional draws shared by the sampler and its tests.

/// V_k ~ Beta(1 + n_k, α + Σ_{j>k} n_j) for k < counts.size().
std::vector<double> draw_sticks(std::span<const std::size_t> counts, double concentration, Rng& rng);

/// β | v, data ~ Gamma(prior_a + n v, prior_b + Σ y) (shape, rate).
double draw_rate(double shape, std::size_t n, double sum_y, double prior_a, double prior_b, Rng& rng);

/// Escobar–West auxiliary-variable update of α given the number of occupied
/// components and the sample size, under a Gamma(a, b) hyperprior.
double draw_concentration(double concentration, std::size_t occupied, std::size_t n, double a, double b, Rng& rng);

/// log p(v | β, data) + log v, up to a constant: the random-walk target on log v.
double log_shape_target(double shape, double rate, std::size_t n, double sum_y, double sum_log_y, double prior_a,
                        double prior_b);

struct SamplerDiagnostics {
  std::size_t shape_proposals = 0;
  std::size_t shape_accepts = 0;
  double mean_instantiated = 0.0;  // average K over retained draws
  double mean_occupied = 0.0;
  std::vector<std::string> warnings;

  double acceptance_rate() const {
    return shape_proposals == 0 ? 0.0 : static_cast<double>(shape_accepts) / static_cast<double>(shape_proposals);
  }
};

/// Walker slice sampler for the DP gamma mixture.
///
/// One sweep runs, in order: update_concentration, update_sticks,
/// update_slices, extend_sticks, update_allocations, update_components.
/// α and V are drawn given the allocations with the slices integrated out,
/// so the slices are refreshed right after.
class DpSampler {
 public:
  /// Incomes must be positive and finite, at least 10 of them.
  DpSampler(std::span<const double> incomes, const SamplerConfig& config);

  void sweep();

  void update_concentration();
  /// Drops trailing empty components, then redraws every stick given counts.
  void update_sticks();
  void update_slices();
  /// Instantiates sticks until the residual weight falls below min_i s_i.
  /// Throws NumericError past config.max_components.
  void extend_sticks();
  void update_allocations();
  void update_components();

  /// Current truncated mixture; the residual component is a fresh draw from
  /// the base measure.
  MixtureDraw emit();

  const LatentState& state() const noexcept { return state_; }
  const SamplerDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  double rate_prior_rate() const noexcept { return rate_prior_b_; }

 private:
  ComponentState draw_from_base();

  std::vector<double> incomes_;
  std::vector<double> log_incomes_;
  SamplerConfig config_;
  double rate_prior_b_;
  Rng rng_;
  LatentState state_;
  SamplerDiagnostics diagnostics_;
};

struct FitResult {
  PosteriorSample sample;
  SamplerDiagnostics diagnostics;
};

/// Runs one chain and returns its retained draws. Deterministic given the
/// incomes and config (including seed).
FitResult fit_with_diagnostics(std::span<const double> incomes, const SamplerConfig& config,
                               const std::string& label = "");
PosteriorSample fit(std::span<const double> incomes, const SamplerConfig& config, const std::string& label = "");

}  // namespace gmdom
