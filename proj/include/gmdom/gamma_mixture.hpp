#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gmdom/grid.hpp"
#include "gmdom/special_functions.hpp"

namespace gmdom {

/// Gamma density parameterized by its mean and shape; rate = shape / mean.
struct GammaComponent {
  double mean = 1.0;
  double shape = 1.0;

  double rate() const noexcept { return shape / mean; }
  bool operator==(const GammaComponent&) const = default;
};

/// One MCMC draw of a truncated gamma mixture: K instantiated components plus
/// the residual component, K + 1 in total.
class MixtureDraw {
 public:
  static constexpr double kWeightSumTolerance = 1e-12;

  /// Throws DomainError unless the sizes match, weights are nonnegative and
  /// sum to one within kWeightSumTolerance, and every component has positive
  /// finite mean and shape.
  MixtureDraw(std::vector<double> weights, std::vector<GammaComponent> components);

  static MixtureDraw single(double shape, double mean);

  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const GammaComponent> components() const noexcept { return components_; }
  std::size_t size() const noexcept { return weights_.size(); }
  /// Number of instantiated components; the draw holds truncation() + 1 terms.
  std::size_t truncation() const noexcept { return weights_.size() - 1; }

  bool operator==(const MixtureDraw&) const = default;

 private:
  std::vector<double> weights_;
  std::vector<GammaComponent> components_;
};

double pdf(const MixtureDraw& draw, double y);
double cdf(const MixtureDraw& draw, double y);
/// Income-share CDF: (1/μ̄) Σ w_k μ_k P(v_k + 1, v_k y / μ_k).
double first_moment_cdf(const MixtureDraw& draw, double y);
double mixture_mean(const MixtureDraw& draw);
/// q with |cdf(q) − u| <= 1e-10.
double quantile(const MixtureDraw& draw, double u);
double lorenz(const MixtureDraw& draw, double u);
double gen_lorenz(const MixtureDraw& draw, double u);
/// 1 − 2∫L by the trapezoid rule on {0, grid points, 1}. Throws DomainError
/// for a restricted grid.
double gini(const MixtureDraw& draw, const DominanceGrid& grid);

inline constexpr double kQuantileTolerance = 1e-10;

/// Quantile and Lorenz ordinates of one draw on a sorted set of proportions.
struct DrawCurves {
  double mean = 0.0;
  std::vector<double> quantile;  // income units
  std::vector<double> lorenz;
};

/// Precomputed, scale-normalized form of a draw for repeated evaluation.
///
/// Component means are divided by the mixture mean, so Lorenz ordinates depend
/// only on the normalized draw: rescaling every mean by a power of two leaves
/// them bit-identical.
class MixtureEvaluator {
 public:
  explicit MixtureEvaluator(const MixtureDraw& draw);

  double mean() const noexcept { return mean_; }

  struct CdfDensity {
    double cdf;
    double density;
  };
  /// CDF and density at z = y / mean.
  CdfDensity normalized_cdf_density(double z) const;
  double normalized_first_moment_cdf(double z) const;

  /// Quantile z of the normalized mixture: bracket by doubling from 1 and
  /// halving from 1e-12, then safeguarded Newton.
  double normalized_quantile(double u) const;

  /// Curves on `u`, which must be strictly increasing in (0, 1). Each point
  /// after the first is warm-started from its predecessor.
  DrawCurves curves(std::span<const double> u) const;

 private:
  struct Term {
    double weight;
    double moment_weight;
    double rate;  // normalized units
    detail::ShapeTerms shape;
    detail::ShapeTerms shape_plus_one;
  };

  double solve(double u, double lo, double hi, double guess) const;

  double mean_ = 0.0;
  std::vector<Term> terms_;
};

}  // namespace gmdom
