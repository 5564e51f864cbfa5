#include "gmdom/gamma_mixture.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "gmdom/errors.hpp"

namespace gmdom {
namespace {

constexpr int kMaxSolverIterations = 200;
constexpr int kMaxBracketSteps = 2200;
constexpr double kLowerBracketStart = 1e-12;

void require_positive(double y, const char* what) {
  if (!(y > 0.0)) throw DomainError(std::string(what) + ": income must be positive");
}

void require_proportion(double u, const char* what) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError(std::string(what) + ": u must lie in (0, 1)");
}

}  // namespace

MixtureDraw::MixtureDraw(std::vector<double> weights, std::vector<GammaComponent> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (weights_.empty()) throw DomainError("mixture draw needs at least one component");
  if (weights_.size() != components_.size()) throw DomainError("mixture draw: weight and component counts differ");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("mixture draw: weights must be nonnegative and finite");
    total += w;
  }
  if (std::fabs(total - 1.0) > kWeightSumTolerance) {
    throw DomainError("mixture draw: weights sum to " + std::to_string(total) + ", not 1");
  }
  for (const auto& c : components_) {
    if (!(c.mean > 0.0) || !std::isfinite(c.mean) || !(c.shape > 0.0) || !std::isfinite(c.shape)) {
      throw DomainError("mixture draw: component mean and shape must be positive and finite");
    }
  }
}

MixtureDraw MixtureDraw::single(double shape, double mean) {
  return MixtureDraw({1.0}, {GammaComponent{mean, shape}});
}

double pdf(const MixtureDraw& draw, double y) {
  require_positive(y, "pdf");
  double total = 0.0;
  for (std::size_t k = 0; k < draw.size(); ++k) {
    const auto& c = draw.components()[k];
    const double rate = c.rate();
    const double x = rate * y;
    const auto terms = detail::make_shape_terms(c.shape);
    const double log_density = detail::log_gamma_prefactor(terms, x) + std::log(rate) - std::log(x);
    total += draw.weights()[k] * std::exp(log_density);
  }
  return total;
}

double cdf(const MixtureDraw& draw, double y) {
  require_positive(y, "cdf");
  double total = 0.0;
  for (std::size_t k = 0; k < draw.size(); ++k) {
    const auto& c = draw.components()[k];
    total += draw.weights()[k] * regularized_gamma_p(c.shape, c.rate() * y);
  }
  return total;
}

double first_moment_cdf(const MixtureDraw& draw, double y) {
  require_positive(y, "first_moment_cdf");
  double total = 0.0;
  for (std::size_t k = 0; k < draw.size(); ++k) {
    const auto& c = draw.components()[k];
    total += draw.weights()[k] * c.mean * regularized_gamma_p(c.shape + 1.0, c.rate() * y);
  }
  return total / mixture_mean(draw);
}

double mixture_mean(const MixtureDraw& draw) {
  double total = 0.0;
  for (std::size_t k = 0; k < draw.size(); ++k) total += draw.weights()[k] * draw.components()[k].mean;
  return total;
}

double quantile(const MixtureDraw& draw, double u) {
  require_proportion(u, "quantile");
  const MixtureEvaluator eval(draw);
  return eval.mean() * eval.normalized_quantile(u);
}

double lorenz(const MixtureDraw& draw, double u) {
  require_proportion(u, "lorenz");
  const MixtureEvaluator eval(draw);
  return eval.normalized_first_moment_cdf(eval.normalized_quantile(u));
}

double gen_lorenz(const MixtureDraw& draw, double u) { return mixture_mean(draw) * lorenz(draw, u); }

double gini(const MixtureDraw& draw, const DominanceGrid& grid) {
  if (grid.is_restricted()) throw DomainError("gini requires the full, unrestricted grid");
  const auto u = grid.points();
  const auto curves = MixtureEvaluator(draw).curves(u);
  double area = 0.5 * u[0] * curves.lorenz[0];
  for (std::size_t i = 1; i < u.size(); ++i) {
    area += 0.5 * (u[i] - u[i - 1]) * (curves.lorenz[i] + curves.lorenz[i - 1]);
  }
  area += 0.5 * (1.0 - u.back()) * (curves.lorenz.back() + 1.0);
  return 1.0 - 2.0 * area;
}

MixtureEvaluator::MixtureEvaluator(const MixtureDraw& draw) : mean_(mixture_mean(draw)) {
  terms_.reserve(draw.size());
  double moment_total = 0.0;
  for (std::size_t k = 0; k < draw.size(); ++k) {
    const auto& c = draw.components()[k];
    const double scaled_mean = c.mean / mean_;
    Term t;
    t.weight = draw.weights()[k];
    t.moment_weight = t.weight * scaled_mean;
    t.rate = c.shape / scaled_mean;
    t.shape = detail::make_shape_terms(c.shape);
    t.shape_plus_one = detail::make_shape_terms(c.shape + 1.0);
    moment_total += t.moment_weight;
    terms_.push_back(t);
  }
  for (auto& t : terms_) t.moment_weight /= moment_total;
}

MixtureEvaluator::CdfDensity MixtureEvaluator::normalized_cdf_density(double z) const {
  CdfDensity out{0.0, 0.0};
  if (z <= 0.0) return out;
  if (std::isinf(z)) return {1.0, 0.0};
  const double log_z = std::log(z);
  for (const auto& t : terms_) {
    if (t.weight == 0.0) continue;
    const double x = t.rate * z;
    const auto ig = detail::incomplete_gamma_p(t.shape, x);
    out.cdf += t.weight * ig.p;
    // rate * x^{a-1} e^{-x} / Γ(a), with x = rate * z.
    out.density += t.weight * std::exp(ig.log_prefactor - log_z);
  }
  return out;
}

double MixtureEvaluator::normalized_first_moment_cdf(double z) const {
  if (z <= 0.0) return 0.0;
  if (std::isinf(z)) return 1.0;
  double total = 0.0;
  for (const auto& t : terms_) {
    if (t.moment_weight == 0.0) continue;
    total += t.moment_weight * detail::incomplete_gamma_p(t.shape_plus_one, t.rate * z).p;
  }
  return total;
}

double MixtureEvaluator::normalized_quantile(double u) const {
  require_proportion(u, "quantile");
  double hi = 1.0;
  std::optional<double> lo;
  int steps = 0;
  while (normalized_cdf_density(hi).cdf < u) {
    lo = hi;
    hi *= 2.0;
    if (++steps > kMaxBracketSteps || std::isinf(hi)) throw NumericError("quantile: upper bracket diverged");
  }
  if (!lo) {
    double low = kLowerBracketStart;
    steps = 0;
    while (normalized_cdf_density(low).cdf > u) {
      hi = std::min(hi, low);
      low *= 0.5;
      if (++steps > kMaxBracketSteps || low == 0.0) throw NumericError("quantile: lower bracket underflowed");
    }
    lo = low;
  }
  const double guess = hi > 4.0 * *lo ? std::sqrt(*lo * hi) : 0.5 * (*lo + hi);
  return solve(u, *lo, hi, guess);
}

// Safeguarded Newton on F(z) = u. Invariant: F(lo) <= u <= F(hi); lo may be
// 0 and hi may be +inf when that side is not yet bracketed.
double MixtureEvaluator::solve(double u, double lo, double hi, double z) const {
  double previous_residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxSolverIterations; ++it) {
    const auto [value, density] = normalized_cdf_density(z);
    const double residual = value - u;
    if (std::fabs(residual) <= kQuantileTolerance) return z;
    if (residual < 0.0) {
      lo = z;
    } else {
      hi = z;
    }
    double next = z - residual / density;
    const bool newton_ok = density > 0.0 && std::isfinite(next) && next > lo && next < hi &&
                           std::fabs(residual) <= 0.5 * previous_residual;
    if (!newton_ok) {
      if (std::isinf(hi)) {
        next = 2.0 * lo;
      } else if (lo == 0.0) {
        next = 0.5 * hi;
      } else if (hi > 4.0 * lo) {
        next = std::sqrt(lo * hi);
      } else {
        next = lo + 0.5 * (hi - lo);
      }
    }
    if (!(next > 0.0)) throw NumericError("quantile: iterate underflowed");
    // Bracket down to a few ulps: the tolerance is below double resolution here.
    if (next == z || (std::isfinite(hi) && hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)) {
      return z;
    }
    previous_residual = std::fabs(residual);
    z = next;
  }
  throw NumericError("quantile: no convergence within 200 iterations");
}

DrawCurves MixtureEvaluator::curves(std::span<const double> u) const {
  DrawCurves out;
  out.mean = mean_;
  out.quantile.resize(u.size());
  out.lorenz.resize(u.size());
  double z = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    require_proportion(u[i], "curves");
    if (i == 0) {
      z = normalized_quantile(u[i]);
    } else {
      const auto [value, density] = normalized_cdf_density(z);
      if (value <= u[i]) {
        double guess = z + (u[i] - value) / density;
        if (!(density > 0.0) || !std::isfinite(guess)) guess = 2.0 * z;
        z = solve(u[i], z, std::numeric_limits<double>::infinity(), guess);
      } else {
        z = normalized_quantile(u[i]);
      }
    }
    out.quantile[i] = mean_ * z;
    out.lorenz[i] = normalized_first_moment_cdf(z);
  }
  return out;
}

}  // namespace gmdom
