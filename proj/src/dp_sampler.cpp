#include "gmdom/dp_sampler.hpp"

#include <algorithm>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "gmdom/errors.hpp"

namespace gmdom {
namespace {

constexpr std::size_t kMinSampleSize = 10;
constexpr std::size_t kInitialClusters = 5;

double uniform_open(Rng& rng) {
  boost::random::uniform_01<double> u;
  double v = 0.0;
  while (v == 0.0) v = u(rng);
  return v;
}

// Gamma with shape/rate parameterization.
double gamma_draw(double shape, double rate, Rng& rng) {
  boost::random::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng);
}

double beta_draw(double a, double b, Rng& rng) {
  const double x = gamma_draw(a, 1.0, rng);
  const double y = gamma_draw(b, 1.0, rng);
  return x / (x + y);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void SamplerConfig::validate() const {
  if (iterations == 0) throw ConfigError("iterations must be positive");
  if (burn_in >= iterations) throw ConfigError("burn_in must be smaller than iterations");
  if (thin == 0) throw ConfigError("thin must be positive");
  if (retained() < 1) throw ConfigError("(iterations - burn_in) / thin must be at least 1");
  for (double v : {prior_shape_a, prior_shape_b, prior_rate_a, prior_rate_b, alpha_a, alpha_b, mh_step}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("prior parameters and mh_step must be positive");
  }
  if (max_components < 2) throw ConfigError("max_components must be at least 2");
}

std::string SamplerConfig::digest() const {
  const auto text = fmt::format("{}|{}|{}|{}|{:.17g}|{:.17g}|{:.17g}|{:.17g}|{}|{:.17g}|{:.17g}|{:.17g}|{}",
                                iterations, burn_in, thin, seed, prior_shape_a, prior_shape_b, prior_rate_a,
                                prior_rate_b, scale_rate_prior_by_mean ? 1 : 0, alpha_a, alpha_b, mh_step,
                                max_components);
  return fmt::format("{:016x}", fnv1a(text));
}

std::vector<double> LatentState::weights() const {
  std::vector<double> w(sticks.size());
  double remaining = 1.0;
  for (std::size_t k = 0; k < sticks.size(); ++k) {
    w[k] = sticks[k] * remaining;
    remaining *= 1.0 - sticks[k];
  }
  return w;
}

double LatentState::residual_weight() const {
  double remaining = 1.0;
  for (double v : sticks) remaining *= 1.0 - v;
  return remaining;
}

std::vector<std::size_t> LatentState::counts() const {
  std::vector<std::size_t> n(sticks.size(), 0);
  for (auto z : allocations) ++n[z];
  return n;
}

std::vector<double> draw_sticks(std::span<const std::size_t> counts, double concentration, Rng& rng) {
  std::vector<double> sticks(counts.size());
  std::size_t above = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  for (std::size_t k = 0; k < counts.size(); ++k) {
    above -= counts[k];
    sticks[k] = beta_draw(1.0 + static_cast<double>(counts[k]), concentration + static_cast<double>(above), rng);
  }
  return sticks;
}

double draw_rate(double shape, std::size_t n, double sum_y, double prior_a, double prior_b, Rng& rng) {
  return gamma_draw(prior_a + static_cast<double>(n) * shape, prior_b + sum_y, rng);
}

double draw_concentration(double concentration, std::size_t occupied, std::size_t n, double a, double b, Rng& rng) {
  const double eta = beta_draw(concentration + 1.0, static_cast<double>(n), rng);
  const double rate = b - std::log(eta);
  const double k = static_cast<double>(occupied);
  double pick_upper = 1.0;
  if (a + k - 1.0 > 0.0) {
    const double odds = (a + k - 1.0) / (static_cast<double>(n) * rate);
    pick_upper = odds / (1.0 + odds);
  }
  const double shape = uniform_open(rng) < pick_upper ? a + k : a + k - 1.0;
  return gamma_draw(shape, rate, rng);
}

double log_shape_target(double shape, double rate, std::size_t n, double sum_y, double sum_log_y, double prior_a,
                        double prior_b) {
  const double nn = static_cast<double>(n);
  return nn * (shape * std::log(rate) - std::lgamma(shape)) + (shape - 1.0) * sum_log_y - rate * sum_y +
         prior_a * std::log(shape) - prior_b * shape;
}

DpSampler::DpSampler(std::span<const double> incomes, const SamplerConfig& config)
    : incomes_(incomes.begin(), incomes.end()), config_(config), rng_(config.seed) {
  config_.validate();
  if (incomes_.size() < kMinSampleSize) throw DomainError("fit needs at least 10 incomes");
  for (double y : incomes_) {
    if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("fit: incomes must be positive and finite");
  }
  log_incomes_.resize(incomes_.size());
  std::transform(incomes_.begin(), incomes_.end(), log_incomes_.begin(), [](double y) { return std::log(y); });

  const double n = static_cast<double>(incomes_.size());
  const double mean = std::accumulate(incomes_.begin(), incomes_.end(), 0.0) / n;
  rate_prior_b_ = config_.scale_rate_prior_by_mean ? config_.prior_rate_b * mean : config_.prior_rate_b;

  const auto [lo, hi] = std::minmax_element(incomes_.begin(), incomes_.end());
  if (*lo == *hi) diagnostics_.warnings.push_back("all incomes are equal; the fit is degenerate");

  // Start from equal-size clusters of the sorted incomes with moment-matched
  // parameters.
  std::vector<std::size_t> order(incomes_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return incomes_[a] < incomes_[b]; });
  const std::size_t clusters = std::min(kInitialClusters, incomes_.size() / 2);
  state_.allocations.assign(incomes_.size(), 0);
  state_.components.assign(clusters, ComponentState{1.0, 1.0});
  for (std::size_t c = 0; c < clusters; ++c) {
    const std::size_t begin = c * order.size() / clusters;
    const std::size_t end = (c + 1) * order.size() / clusters;
    double s = 0.0;
    double ss = 0.0;
    for (std::size_t r = begin; r < end; ++r) {
      state_.allocations[order[r]] = c;
      s += incomes_[order[r]];
      ss += incomes_[order[r]] * incomes_[order[r]];
    }
    const double m = s / static_cast<double>(end - begin);
    const double var = std::max(ss / static_cast<double>(end - begin) - m * m, 0.0);
    const double shape = var > 0.0 ? std::clamp(m * m / var, 0.1, 1000.0) : 1000.0;
    state_.components[c] = {shape, shape / m};
  }
  state_.concentration = 1.0;
  std::vector<std::size_t> n_k(clusters, 0);
  for (auto z : state_.allocations) ++n_k[z];
  state_.sticks = draw_sticks(n_k, state_.concentration, rng_);
  state_.slices.assign(incomes_.size(), 0.0);
}

ComponentState DpSampler::draw_from_base() {
  const double shape = gamma_draw(config_.prior_shape_a, config_.prior_shape_b, rng_);
  const double rate = gamma_draw(config_.prior_rate_a, rate_prior_b_, rng_);
  return {shape, rate};
}

void DpSampler::sweep() {
  update_concentration();
  update_sticks();
  update_slices();
  extend_sticks();
  update_allocations();
  update_components();
}

void DpSampler::update_concentration() {
  const auto n_k = state_.counts();
  const auto occupied = static_cast<std::size_t>(std::count_if(n_k.begin(), n_k.end(), [](auto c) { return c > 0; }));
  state_.concentration =
      draw_concentration(state_.concentration, occupied, incomes_.size(), config_.alpha_a, config_.alpha_b, rng_);
}

void DpSampler::update_sticks() {
  auto n_k = state_.counts();
  std::size_t keep = n_k.size();
  while (keep > 0 && n_k[keep - 1] == 0) --keep;
  n_k.resize(keep);
  state_.components.resize(keep);
  state_.sticks = draw_sticks(n_k, state_.concentration, rng_);
}

void DpSampler::update_slices() {
  const auto w = state_.weights();
  for (std::size_t i = 0; i < incomes_.size(); ++i) state_.slices[i] = uniform_open(rng_) * w[state_.allocations[i]];
}

void DpSampler::extend_sticks() {
  const double min_slice = *std::min_element(state_.slices.begin(), state_.slices.end());
  double remaining = state_.residual_weight();
  while (remaining >= min_slice) {
    if (state_.sticks.size() >= config_.max_components) {
      throw NumericError(fmt::format(
          "slice sampler needs more than {} components (residual weight {:.3g}, smallest slice {:.3g}, alpha {:.4g})",
          config_.max_components, remaining, min_slice, state_.concentration));
    }
    const double v = beta_draw(1.0, state_.concentration, rng_);
    state_.sticks.push_back(v);
    state_.components.push_back(draw_from_base());
    remaining *= 1.0 - v;
  }
}

void DpSampler::update_allocations() {
  const auto w = state_.weights();
  const std::size_t k_count = w.size();
  std::vector<double> log_norm(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& c = state_.components[k];
    log_norm[k] = c.shape * std::log(c.rate) - std::lgamma(c.shape);
  }
  std::vector<double> log_lik(k_count);
  std::vector<std::size_t> candidates;
  candidates.reserve(k_count);
  for (std::size_t i = 0; i < incomes_.size(); ++i) {
    candidates.clear();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_count; ++k) {
      if (w[k] <= state_.slices[i]) continue;
      const auto& c = state_.components[k];
      log_lik[k] = log_norm[k] + (c.shape - 1.0) * log_incomes_[i] - c.rate * incomes_[i];
      best = std::max(best, log_lik[k]);
      candidates.push_back(k);
    }
    // The current allocation always satisfies w_z > s, so candidates is nonempty.
    double total = 0.0;
    for (auto k : candidates) {
      log_lik[k] = std::exp(log_lik[k] - best);
      total += log_lik[k];
    }
    double target = uniform_open(rng_) * total;
    std::size_t chosen = candidates.back();
    for (auto k : candidates) {
      target -= log_lik[k];
      if (target <= 0.0) {
        chosen = k;
        break;
      }
    }
    state_.allocations[i] = chosen;
  }
}

void DpSampler::update_components() {
  const std::size_t k_count = state_.components.size();
  std::vector<std::size_t> n(k_count, 0);
  std::vector<double> sum_y(k_count, 0.0);
  std::vector<double> sum_log_y(k_count, 0.0);
  for (std::size_t i = 0; i < incomes_.size(); ++i) {
    const auto z = state_.allocations[i];
    ++n[z];
    sum_y[z] += incomes_[i];
    sum_log_y[z] += log_incomes_[i];
  }
  boost::random::normal_distribution<double> step(0.0, config_.mh_step);
  for (std::size_t k = 0; k < k_count; ++k) {
    auto& c = state_.components[k];
    if (n[k] == 0) {
      c = draw_from_base();
      continue;
    }
    c.rate = draw_rate(c.shape, n[k], sum_y[k], config_.prior_rate_a, rate_prior_b_, rng_);
    const double proposal = c.shape * std::exp(step(rng_));
    const double log_ratio =
        log_shape_target(proposal, c.rate, n[k], sum_y[k], sum_log_y[k], config_.prior_shape_a, config_.prior_shape_b) -
        log_shape_target(c.shape, c.rate, n[k], sum_y[k], sum_log_y[k], config_.prior_shape_a, config_.prior_shape_b);
    ++diagnostics_.shape_proposals;
    if (std::log(uniform_open(rng_)) < log_ratio) {
      c.shape = proposal;
      ++diagnostics_.shape_accepts;
    }
  }
}

MixtureDraw DpSampler::emit() {
  auto weights = state_.weights();
  std::vector<GammaComponent> comps;
  comps.reserve(weights.size() + 1);
  for (const auto& c : state_.components) comps.push_back({c.shape / c.rate, c.shape});
  const auto residual = draw_from_base();
  comps.push_back({residual.shape / residual.rate, residual.shape});
  weights.push_back(state_.residual_weight());
  return MixtureDraw(std::move(weights), std::move(comps));
}

FitResult fit_with_diagnostics(std::span<const double> incomes, const SamplerConfig& config, const std::string& label) {
  DpSampler sampler(incomes, config);
  FitResult out;
  out.sample.meta = {label, config.seed, config.digest()};
  out.sample.draws.reserve(config.retained());
  double instantiated = 0.0;
  double occupied = 0.0;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    sampler.sweep();
    if (it < config.burn_in || (it - config.burn_in + 1) % config.thin != 0) continue;
    if (out.sample.draws.size() == config.retained()) break;
    out.sample.draws.push_back(sampler.emit());
    const auto n_k = sampler.state().counts();
    instantiated += static_cast<double>(n_k.size());
    occupied += static_cast<double>(std::count_if(n_k.begin(), n_k.end(), [](auto c) { return c > 0; }));
  }
  out.diagnostics = sampler.diagnostics();
  const double m = static_cast<double>(out.sample.draws.size());
  out.diagnostics.mean_instantiated = instantiated / m;
  out.diagnostics.mean_occupied = occupied / m;
  return out;
}

PosteriorSample fit(std::span<const double> incomes, const SamplerConfig& config, const std::string& label) {
  return fit_with_diagnostics(incomes, config, label).sample;
}

}  // namespace gmdom
