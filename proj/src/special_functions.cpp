#include "gmdom/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gmdom/errors.hpp"

namespace gmdom {
namespace {

constexpr double kLargeShape = 10.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 1'000'000;

// log Γ(a) − [(a − ½) log a − a + ½ log 2π], Bernoulli-number series.
double stirling_correction(double a) {
  // B_{2k} / (2k (2k − 1)) for k = 1..8.
  constexpr double kCoeffs[] = {1.0 / 12.0,          -1.0 / 360.0,     1.0 / 1260.0,
                                -1.0 / 1680.0,       1.0 / 1188.0,     -691.0 / 360360.0,
                                1.0 / 156.0,         -3617.0 / 122400.0};
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  double sum = 0.0;
  double power = inv;
  for (double c : kCoeffs) {
    sum += c * power;
    power *= inv2;
  }
  return sum;
}

// log(x/a) − (x − a)/a without the cancellation a naive evaluation suffers
// when x is close to a.
double log1pmx_ratio(double x, double a) {
  const double t = (x - a) / a;
  if (std::fabs(t) < 0.5) return std::log1p(t) - t;
  return std::log(x / a) - t;
}

double series_sum(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double denom = a;
  for (int i = 0; i < kMaxIterations; ++i) {
    denom += 1.0;
    term *= x / denom;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps * 0.5) return sum;
  }
  throw NumericError("incomplete gamma series did not converge");
}

// Continued fraction for Γ(a, x) / (x^a e^{-x}), modified Lentz.
double continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps * 0.5) return h;
  }
  throw NumericError("incomplete gamma continued fraction did not converge");
}

void check_arguments(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete gamma: shape must be positive and finite");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma: argument must be nonnegative");
}

}  // namespace

namespace detail {

ShapeTerms make_shape_terms(double shape) {
  ShapeTerms terms;
  terms.shape = shape;
  if (shape >= kLargeShape) {
    terms.stirling = stirling_correction(shape);
    terms.log_gamma = (shape - 0.5) * std::log(shape) - shape + 0.5 * std::log(2.0 * std::numbers::pi) +
                      terms.stirling;
  } else {
    terms.log_gamma = std::lgamma(shape);
  }
  return terms;
}

double log_gamma_prefactor(const ShapeTerms& terms, double x) {
  const double a = terms.shape;
  if (a >= kLargeShape) {
    return a * log1pmx_ratio(x, a) + 0.5 * std::log(a / (2.0 * std::numbers::pi)) - terms.stirling;
  }
  return a * std::log(x) - x - terms.log_gamma;
}

IncompleteGamma incomplete_gamma_p(const ShapeTerms& terms, double x) {
  const double a = terms.shape;
  const double log_pref = log_gamma_prefactor(terms, x);
  if (x < a + 1.0) {
    return {std::exp(log_pref) * series_sum(a, x), log_pref};
  }
  const double q = std::exp(log_pref) * continued_fraction(a, x);
  return {1.0 - q, log_pref};
}

}  // namespace detail

double log_gamma(double a) {
  if (!(a > 0.0)) throw DomainError("log_gamma: argument must be positive");
  return detail::make_shape_terms(a).log_gamma;
}

double regularized_gamma_p(double a, double x) {
  check_arguments(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return detail::incomplete_gamma_p(detail::make_shape_terms(a), x).p;
}

double regularized_gamma_q(double a, double x) {
  check_arguments(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const auto terms = detail::make_shape_terms(a);
  const double log_pref = detail::log_gamma_prefactor(terms, x);
  if (x < a + 1.0) return 1.0 - std::exp(log_pref) * series_sum(a, x);
  return std::exp(log_pref) * continued_fraction(a, x);
}

}  // namespace gmdom
