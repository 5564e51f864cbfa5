#include "gmdom/survey_bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <numeric>
#include <thread>

#include "gmdom/errors.hpp"

namespace gmdom {
namespace {

// Prefix sums with point updates; find() returns the first index whose
// cumulative sum exceeds the target.
template <typename T>
class FenwickTree {
 public:
  explicit FenwickTree(std::size_t n) : tree_(n + 1, T{}) {}

  void add(std::size_t index, T delta) {
    for (std::size_t i = index + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  T total() const {
    T sum{};
    for (std::size_t i = tree_.size() - 1; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

  std::size_t find(T target) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return std::min(pos, tree_.size() - 2);
  }

 private:
  std::vector<T> tree_;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kUrnStream = 1;
constexpr std::uint64_t kChainStream = 2;

// Urn picks as unit indices, in draw order.
std::vector<std::size_t> urn_picks(const WeightedSample& sample, Rng& rng, std::size_t* clamped) {
  sample.validate();
  const std::size_t n = sample.size();
  const std::size_t big_n = sample.population_size();
  if (big_n < n) throw DomainError(fmt::format("population size round(sum w) = {} is below the sample size {}", big_n, n));
  const std::size_t extra = big_n - n;
  const double increment = static_cast<double>(extra) / static_cast<double>(n);
  FenwickTree<double> mass(n);
  std::size_t clamped_units = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = sample.weights[i] - 1.0;
    if (m < 0.0) ++clamped_units;
    mass.add(i, std::max(m, 0.0));
  }
  if (clamped) *clamped = clamped_units;

  boost::random::uniform_01<double> unif;
  std::vector<std::size_t> picks;
  picks.reserve(extra);
  for (std::size_t k = 0; k < extra; ++k) {
    const double total = mass.total();
    std::size_t unit;
    if (total > 0.0) {
      unit = mass.find(unif(rng) * total);
    } else {
      unit = std::min(static_cast<std::size_t>(unif(rng) * static_cast<double>(n)), n - 1);
    }
    picks.push_back(unit);
    mass.add(unit, increment);
  }
  return picks;
}

}  // namespace

void WeightedSample::validate() const {
  if (incomes.size() != weights.size()) throw DomainError("weighted sample: incomes and weights differ in length");
  if (incomes.empty()) throw DomainError("weighted sample is empty");
  for (std::size_t i = 0; i < incomes.size(); ++i) {
    if (!(incomes[i] > 0.0) || !std::isfinite(incomes[i])) throw DomainError("weighted sample: incomes must be positive");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) throw DomainError("weighted sample: weights must be positive");
  }
}

double WeightedSample::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::size_t WeightedSample::population_size() const {
  return static_cast<std::size_t>(std::llround(total_weight()));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(tag)) + index);
}

UrnPopulation synthetic_population_counts(const WeightedSample& sample, std::uint64_t seed) {
  Rng rng(seed);
  UrnPopulation out;
  const auto picks = urn_picks(sample, rng, &out.clamped_units);
  out.counts.assign(sample.size(), 1);
  for (auto unit : picks) ++out.counts[unit];
  return out;
}

std::vector<double> synthetic_population(const WeightedSample& sample, std::uint64_t seed) {
  Rng rng(seed);
  const auto picks = urn_picks(sample, rng, nullptr);
  std::vector<double> population(sample.incomes);
  population.reserve(sample.size() + picks.size());
  for (auto unit : picks) population.push_back(sample.incomes[unit]);
  return population;
}

std::vector<double> pseudo_sample(const WeightedSample& sample, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  const auto picks = urn_picks(sample, rng, nullptr);
  const std::size_t big_n = sample.size() + picks.size();
  if (m > big_n) throw DomainError(fmt::format("pseudo sample size {} exceeds population size {}", m, big_n));
  if (m == 0) throw DomainError("pseudo sample size must be positive");

  FenwickTree<long long> remaining(sample.size());
  std::vector<long long> counts(sample.size(), 1);
  for (auto unit : picks) ++counts[unit];
  for (std::size_t i = 0; i < counts.size(); ++i) remaining.add(i, counts[i]);

  boost::random::uniform_01<double> unif;
  std::vector<double> out;
  out.reserve(m);
  long long left = static_cast<long long>(big_n);
  for (std::size_t j = 0; j < m; ++j) {
    const auto slot = std::min(static_cast<long long>(unif(rng) * static_cast<double>(left)), left - 1);
    const std::size_t unit = remaining.find(slot);
    out.push_back(sample.incomes[unit]);
    remaining.add(unit, -1);
    --left;
  }
  return out;
}

FitResult fit_weighted_with_diagnostics(const WeightedSample& sample, const SamplerConfig& config,
                                        std::size_t replications) {
  config.validate();
  sample.validate();
  if (replications == 0) throw ConfigError("replications must be at least 1");
  const std::size_t per_chain = (config.retained() + replications - 1) / replications;

  std::vector<FitResult> chains(replications);
  std::vector<std::exception_ptr> errors(replications);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < replications; b = next++) {
      try {
        const auto urn_seed = derive_seed(config.seed, kUrnStream, b);
        const auto pseudo = pseudo_sample(sample, sample.size(), urn_seed);
        SamplerConfig chain = config;
        chain.seed = derive_seed(config.seed, kChainStream, b);
        chain.iterations = config.burn_in + per_chain * config.thin;
        chains[b] = fit_with_diagnostics(pseudo, chain, sample.label);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(replications, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  FitResult out;
  std::vector<PosteriorSample> parts;
  double instantiated = 0.0;
  double occupied = 0.0;
  for (auto& c : chains) {
    out.diagnostics.shape_proposals += c.diagnostics.shape_proposals;
    out.diagnostics.shape_accepts += c.diagnostics.shape_accepts;
    instantiated += c.diagnostics.mean_instantiated;
    occupied += c.diagnostics.mean_occupied;
    for (auto& w : c.diagnostics.warnings) out.diagnostics.warnings.push_back(std::move(w));
    parts.push_back(std::move(c.sample));
  }
  out.diagnostics.mean_instantiated = instantiated / static_cast<double>(replications);
  out.diagnostics.mean_occupied = occupied / static_cast<double>(replications);
  const auto clamped = std::count_if(sample.weights.begin(), sample.weights.end(), [](double w) { return w < 1.0; });
  if (clamped > 0) {
    out.diagnostics.warnings.push_back(
        fmt::format("{} units have weight below 1; their urn mass was clamped to 0", clamped));
  }
  out.sample = concatenate(std::move(parts));
  out.sample.meta = {sample.label, config.seed, fmt::format("{}-b{}", config.digest(), replications)};
  return out;
}

PosteriorSample fit_weighted(const WeightedSample& sample, const SamplerConfig& config, std::size_t replications) {
  return fit_weighted_with_diagnostics(sample, config, replications).sample;
}

}  // namespace gmdom
