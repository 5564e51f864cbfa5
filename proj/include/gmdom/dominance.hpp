#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmdom/grid.hpp"
#include "gmdom/posterior.hpp"

namespace gmdom {

/// FSD compares quantile functions, GLD generalized Lorenz curves, LD Lorenz curves.
enum class CurveKind { FSD, GLD, LD };

inline constexpr std::array<CurveKind, 3> kAllCurveKinds{CurveKind::FSD, CurveKind::GLD, CurveKind::LD};

/// "fsd", "gld", "ld".
std::string_view to_string(CurveKind kind);
/// Case-insensitive inverse of to_string; throws ConfigError.
CurveKind parse_curve_kind(std::string_view text);

struct ProbabilityCurve {
  std::vector<double> u;
  std::vector<double> values;
};

struct DominanceResult {
  double p_x_over_y = 0.0;
  double p_y_over_x = 0.0;
  double p_neither = 0.0;  // 1 − p_x_over_y − p_y_over_x, clamped to [0, 1]
  ProbabilityCurve curve_x_over_y;
  std::size_t m_used = 0;
  std::size_t tie_count = 0;  // pairs equal at every active grid point
};

/// Curve ordinates of every draw of a sample on every point of a grid.
///
/// Only the requested kinds are stored. Restrictions on the grid are ignored
/// here: all points are evaluated and comparisons select the active range.
class CurveTable {
 public:
  CurveTable(const PosteriorSample& sample, const DominanceGrid& grid,
             std::initializer_list<CurveKind> kinds = {CurveKind::FSD, CurveKind::GLD, CurveKind::LD});

  std::size_t draws() const noexcept { return draws_; }
  std::span<const double> points() const noexcept { return points_; }
  bool has(CurveKind kind) const noexcept { return !values_[index(kind)].empty(); }
  /// Ordinates of one draw on all grid points; throws DomainError if the kind was not built.
  std::span<const double> row(CurveKind kind, std::size_t draw) const;

 private:
  static std::size_t index(CurveKind kind) noexcept { return static_cast<std::size_t>(kind); }

  std::size_t draws_ = 0;
  std::vector<double> points_;
  std::array<std::vector<double>, 3> values_;
};

/// Ordinates of one draw on the active points of `grid`.
std::vector<double> curve_values(const MixtureDraw& draw, CurveKind kind, const DominanceGrid& grid);

/// Pairs draw m of x with draw m of y for m < min(M_x, M_y). Ties at every
/// active point count toward both directions.
DominanceResult dominance_probabilities(const CurveTable& x, const CurveTable& y, CurveKind kind,
                                        const DominanceGrid& grid);
DominanceResult dominance_probabilities(const PosteriorSample& x, const PosteriorSample& y, CurveKind kind,
                                        const DominanceGrid& grid);

/// Same as dominance_probabilities but pairs draw m of x with draw y_order[m] of y.
DominanceResult reordered_probabilities(const CurveTable& x, const CurveTable& y, CurveKind kind,
                                        const DominanceGrid& grid, std::span<const std::size_t> y_order);

ProbabilityCurve probability_curve(const CurveTable& x, const CurveTable& y, CurveKind kind,
                                   const DominanceGrid& grid);
ProbabilityCurve probability_curve(const PosteriorSample& x, const PosteriorSample& y, CurveKind kind,
                                   const DominanceGrid& grid);

/// Dominance over u_lo <= u_i <= u_hi of the standard grid.
DominanceResult restricted_probability(const PosteriorSample& x, const PosteriorSample& y, CurveKind kind,
                                       double u_lo, double u_hi);

struct Bounds {
  double min = 0.0;
  double avg = 0.0;
  double max = 0.0;
};

struct RandomizedBounds {
  Bounds x_over_y;
  Bounds y_over_x;
  Bounds neither;
  std::size_t reorderings = 0;
  std::size_t m_used = 0;
};

/// Recomputes the dominance probabilities under R seeded random orderings of
/// y's draws. The average is the headline estimate. Reordering r is
/// generated from its own derived seed, so results do not depend on thread
/// scheduling.
RandomizedBounds randomized_bounds(const CurveTable& x, const CurveTable& y, CurveKind kind, const DominanceGrid& grid,
                                   std::size_t reorderings, std::uint64_t seed);
RandomizedBounds randomized_bounds(const PosteriorSample& x, const PosteriorSample& y, CurveKind kind,
                                   const DominanceGrid& grid, std::size_t reorderings, std::uint64_t seed);

/// The permutation of [0, n) used for reordering r.
std::vector<std::size_t> reordering(std::size_t n, std::uint64_t seed, std::size_t r);

}  // namespace gmdom
