#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gmdom/dp_sampler.hpp"
#include "gmdom/errors.hpp"

using namespace gmdom;

namespace {

std::vector<double> two_component_data(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::gamma_distribution<double> low(2.0, 0.5);   // shape 2, mean 1
  std::gamma_distribution<double> high(4.0, 1.0);  // shape 4, mean 4
  std::vector<double> y(n);
  for (auto& v : y) v = coin(rng) ? low(rng) : high(rng);
  return y;
}

SamplerConfig short_config(std::size_t iterations, std::size_t burn_in, std::uint64_t seed = 3) {
  SamplerConfig c;
  c.iterations = iterations;
  c.burn_in = burn_in;
  c.seed = seed;
  return c;
}

// Asymptotic Kolmogorov distribution tail, with the usual small-sample
// correction of the statistic.
double ks_p_value(std::vector<double> sample, auto cdf_fn) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf_fn(sample[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

// Batch-means standard error for an autocorrelated chain.
double batch_means_se(const std::vector<double>& chain, std::size_t batches = 50) {
  const std::size_t len = chain.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += chain[b * len + i];
    means[b] = s / len;
  }
  double m = 0.0;
  for (double v : means) m += v;
  m /= batches;
  double var = 0.0;
  for (double v : means) var += (v - m) * (v - m);
  var /= batches - 1;
  return std::sqrt(var / batches);
}

}  // namespace

TEST(SamplerConfig, Validation) {
  SamplerConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.retained(), 10'000u);
  c.burn_in = c.iterations;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SamplerConfig{};
  c.thin = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SamplerConfig{};
  c.mh_step = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SamplerConfig{};
  c.alpha_b = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(SamplerConfig{}.digest(), SamplerConfig{}.digest());
  c = SamplerConfig{};
  c.seed = 9;
  EXPECT_NE(c.digest(), SamplerConfig{}.digest());
}

TEST(Fit, RejectsBadData) {
  const auto c = short_config(20, 10);
  std::vector<double> y(20, 1.0);
  y[3] = 0.0;
  EXPECT_THROW(fit(y, c), DomainError);
  y[3] = -2.0;
  EXPECT_THROW(fit(y, c), DomainError);
  EXPECT_THROW(fit(std::vector<double>(9, 1.0), c), DomainError);
}

TEST(Fit, DegenerateSampleWarnsAndRuns) {
  const auto result = fit_with_diagnostics(std::vector<double>(50, 3.0), short_config(200, 100));
  EXPECT_EQ(result.sample.size(), 100u);
  ASSERT_FALSE(result.diagnostics.warnings.empty());
  // The occupied component concentrates on the repeated value.
  for (const auto& d : result.sample.draws) {
    const auto w = d.weights();
    const auto top = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
    EXPECT_NEAR(d.components()[top].mean, 3.0, 0.5);
  }
}

TEST(Fit, DrawCountThinningAndWeights) {
  const auto y = two_component_data(300, 1);
  auto c = short_config(100, 40);
  c.thin = 7;
  const auto s = fit(y, c, "bench");
  EXPECT_EQ(s.size(), 60u / 7u);
  EXPECT_EQ(s.meta.label, "bench");
  EXPECT_EQ(s.meta.seed, c.seed);
  EXPECT_EQ(s.meta.config_digest, c.digest());
  for (const auto& d : s.draws) {
    double total = 0.0;
    for (double w : d.weights()) {
      EXPECT_GE(w, 0.0);
      total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_GE(d.size(), 2u);  // at least one instantiated component plus the residual
  }
}

TEST(Fit, ReproducibleGivenSeed) {
  const auto y = two_component_data(400, 2);
  const auto c = short_config(300, 100, 17);
  const auto a = fit(y, c);
  const auto b = fit(y, c);
  EXPECT_TRUE(a == b);
  const auto other = fit(y, short_config(300, 100, 18));
  EXPECT_FALSE(a == other);
}

TEST(DrawSticks, PriorRecoveryWithNoObservations) {
  Rng rng(99);
  const double alpha = 2.0;
  const std::vector<std::size_t> empty(5, 0);
  std::vector<double> first;
  std::vector<double> pooled;
  for (int sweep = 0; sweep < 10'000; ++sweep) {
    const auto v = draw_sticks(empty, alpha, rng);
    first.push_back(v[0]);
    pooled.push_back(v[sweep % 5]);
  }
  auto beta1 = [&](double x) { return 1.0 - std::pow(1.0 - x, alpha); };
  EXPECT_GT(ks_p_value(first, beta1), 0.01);
  EXPECT_GT(ks_p_value(pooled, beta1), 0.01);
  // The test has power: a wrong α is rejected.
  auto wrong = [](double x) { return 1.0 - std::pow(1.0 - x, 2.5); };
  EXPECT_LT(ks_p_value(first, wrong), 0.01);
}

TEST(DrawSticks, ConditionalMeansUseTailCounts) {
  Rng rng(5);
  const std::vector<std::size_t> counts{30, 0, 10};
  const double alpha = 1.5;
  std::vector<double> sums(3, 0.0);
  constexpr int kDraws = 20'000;
  for (int i = 0; i < kDraws; ++i) {
    const auto v = draw_sticks(counts, alpha, rng);
    for (int k = 0; k < 3; ++k) sums[k] += v[k];
  }
  // E[Beta(a, b)] = a / (a + b).
  const double expected[] = {31.0 / (31.0 + 1.5 + 10.0), 1.0 / (1.0 + 1.5 + 10.0), 11.0 / (11.0 + 1.5)};
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(sums[k] / kDraws, expected[k], 0.005) << k;
}

TEST(DrawRate, MatchesConjugatePosteriorMoments) {
  Rng rng(11);
  const double shape = 2.5;
  const std::size_t n = 50;
  const double sum_y = 40.0;
  const double a = 2.0;
  const double b = 3.0;
  const double post_shape = a + n * shape;
  const double post_rate = b + sum_y;
  const double mean = post_shape / post_rate;
  const double var = post_shape / (post_rate * post_rate);
  constexpr int kDraws = 40'000;
  double s = 0.0;
  double ss = 0.0;
  double s4 = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double beta = draw_rate(shape, n, sum_y, a, b, rng);
    s += beta;
    ss += (beta - mean) * (beta - mean);
    s4 += std::pow(beta - mean, 4);
  }
  EXPECT_NEAR(s / kDraws, mean, 3.0 * std::sqrt(var / kDraws));
  const double var_hat = ss / kDraws;
  const double var_se = std::sqrt((s4 / kDraws - var_hat * var_hat) / kDraws);
  EXPECT_NEAR(var_hat, var, 3.0 * var_se);
}

// The Escobar–West chain on α with fixed (k, n) has stationary density
// p(α | k, n) ∝ α^{a−1} e^{−bα} α^k Γ(α) / Γ(α + n); the oracle integrates it.
TEST(DrawConcentration, StationaryMeanMatchesQuadrature) {
  const std::size_t k = 4;
  const std::size_t n = 200;
  const double a = 2.0;
  const double b = 1.0;
  auto log_density = [&](double alpha) {
    return (a - 1.0 + k) * std::log(alpha) - b * alpha + std::lgamma(alpha) - std::lgamma(alpha + n);
  };
  double z = 0.0;
  double m1 = 0.0;
  const double h = 1e-4;
  for (double alpha = h; alpha < 40.0; alpha += h) {
    const double d = std::exp(log_density(alpha) - log_density(1.0));
    z += d;
    m1 += alpha * d;
  }
  const double oracle_mean = m1 / z;

  Rng rng(21);
  double alpha = 1.0;
  std::vector<double> chain;
  for (int i = 0; i < 60'000; ++i) {
    alpha = draw_concentration(alpha, k, n, a, b, rng);
    if (i >= 1000) chain.push_back(alpha);
  }
  double mean = 0.0;
  for (double v : chain) mean += v;
  mean /= chain.size();
  EXPECT_NEAR(mean, oracle_mean, 3.0 * batch_means_se(chain));
}

TEST(LogShapeTarget, DifferencesMatchGammaLikelihood) {
  // Target ratio for a single observation against the explicit gamma log density.
  const double y = 1.7;
  const double rate = 0.8;
  auto explicit_target = [&](double v) {
    const double log_lik = v * std::log(rate) - std::lgamma(v) + (v - 1) * std::log(y) - rate * y;
    const double log_prior = (2.0 - 1.0) * std::log(v) - 0.25 * v;
    return log_lik + log_prior + std::log(v);
  };
  const double d_impl = log_shape_target(3.0, rate, 1, y, std::log(y), 2.0, 0.25) -
                        log_shape_target(1.2, rate, 1, y, std::log(y), 2.0, 0.25);
  EXPECT_NEAR(d_impl, explicit_target(3.0) - explicit_target(1.2), 1e-12);
}

TEST(DpSampler, SliceInvariantsHoldThroughSweeps) {
  const auto y = two_component_data(500, 4);
  DpSampler sampler(y, short_config(10, 0));
  for (int it = 0; it < 50; ++it) {
    sampler.update_concentration();
    sampler.update_sticks();
    sampler.update_slices();
    {
      const auto& st = sampler.state();
      const auto w = st.weights();
      for (std::size_t i = 0; i < y.size(); ++i) {
        ASSERT_GT(st.slices[i], 0.0);
        ASSERT_LT(st.slices[i], w[st.allocations[i]]);
      }
    }
    sampler.extend_sticks();
    {
      const auto& st = sampler.state();
      const double min_s = *std::min_element(st.slices.begin(), st.slices.end());
      ASSERT_LT(st.residual_weight(), min_s);
      const auto w = st.weights();
      double total = st.residual_weight();
      for (double v : w) total += v;
      ASSERT_NEAR(total, 1.0, 1e-12);
      ASSERT_EQ(st.components.size(), st.sticks.size());
    }
    sampler.update_allocations();
    for (std::size_t i = 0; i < y.size(); ++i) {
      const auto& st = sampler.state();
      ASSERT_LT(st.slices[i], st.weights()[st.allocations[i]]);
    }
    sampler.update_components();
  }
  EXPECT_GT(sampler.state().concentration, 0.0);
}

TEST(DpSampler, RatePriorScalesWithSampleMean) {
  auto y = two_component_data(100, 6);
  DpSampler a(y, short_config(10, 0));
  for (auto& v : y) v *= 10.0;
  DpSampler b(y, short_config(10, 0));
  EXPECT_NEAR(b.rate_prior_rate() / a.rate_prior_rate(), 10.0, 1e-12);
}

TEST(Fit, ShapeAcceptanceWithinTuningBounds) {
  const auto y = two_component_data(2000, 42);
  const auto r = fit_with_diagnostics(y, short_config(3000, 1000));
  EXPECT_GE(r.diagnostics.acceptance_rate(), 0.1);
  EXPECT_LE(r.diagnostics.acceptance_rate(), 0.6);
}

TEST(Fit, SingleGammaGiniRecovery) {
  std::mt19937_64 rng(8);
  std::gamma_distribution<double> g(2.0, 0.5);
  std::vector<double> y(5000);
  for (auto& v : y) v = g(rng);
  const auto s = fit(y, short_config(1500, 1000));
  const auto grid = DominanceGrid::standard();
  double total = 0.0;
  for (const auto& d : s.draws) total += gini(d, grid);
  EXPECT_NEAR(total / s.size(), 0.375, 0.02);
}

TEST(Fit, ChainsWithDifferentSeedsAgreeOnDensity) {
  const auto y = two_component_data(2000, 42);
  const auto a = fit(y, short_config(5000, 2000, 1));
  const auto b = fit(y, short_config(5000, 2000, 2));
  EXPECT_FALSE(a == b);
  const double h = 0.02;
  double l1 = 0.0;
  for (double t = h / 2; t < 25.0; t += h) {
    double fa = 0.0;
    double fb = 0.0;
    for (const auto& d : a.draws) fa += pdf(d, t);
    for (const auto& d : b.draws) fb += pdf(d, t);
    l1 += std::fabs(fa / a.size() - fb / b.size()) * h;
  }
  EXPECT_LT(l1, 0.02);
}
