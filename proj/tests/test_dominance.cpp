#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "gmdom/dominance.hpp"
#include "gmdom/errors.hpp"
#include "gmdom/gamma_mixture.hpp"
#include "test_support.hpp"

using namespace gmdom;
using test_support::jittered;
using test_support::random_mixture;
using test_support::repeated;

namespace {

PosteriorSample rescaled(const PosteriorSample& s, double factor) {
  PosteriorSample out = s;
  for (auto& d : out.draws) {
    std::vector<double> w(d.weights().begin(), d.weights().end());
    std::vector<GammaComponent> c(d.components().begin(), d.components().end());
    for (auto& comp : c) comp.mean *= factor;
    d = MixtureDraw(std::move(w), std::move(c));
  }
  return out;
}

// Two overlapping posterior-like draw sets whose dominance is uncertain.
struct Pair {
  PosteriorSample x, y;
};

Pair uncertain_pair(std::uint64_t seed, std::size_t m = 300) {
  std::mt19937_64 rng(seed);
  const auto base = random_mixture(rng, 4);
  return {jittered(rng, base, m, 1.02, 0.03), jittered(rng, base, m, 1.0, 0.03)};
}

void expect_identity_holds(const DominanceResult& r) {
  EXPECT_GE(r.p_neither, 0.0);
  if (r.tie_count == 0) EXPECT_NEAR(r.p_x_over_y + r.p_y_over_x + r.p_neither, 1.0, 1e-12);
}

}  // namespace

TEST(CurveKind, ParsesNames) {
  for (auto kind : kAllCurveKinds) EXPECT_EQ(parse_curve_kind(to_string(kind)), kind);
  EXPECT_EQ(parse_curve_kind("GLD"), CurveKind::GLD);
  EXPECT_THROW(parse_curve_kind("ssd"), ConfigError);
}

TEST(CurveValues, ExponentialMedianAndEndpoints) {
  const auto grid = DominanceGrid::standard();
  const auto expo = MixtureDraw::single(1.0, 1.0);
  const auto q = curve_values(expo, CurveKind::FSD, grid);
  ASSERT_EQ(q.size(), 999u);
  EXPECT_NEAR(q[499], std::log(2.0), 1e-9);
  const auto ld = curve_values(expo, CurveKind::LD, grid);
  // L(0.999) = 0.999 + 0.001 ln 0.001 for the exponential.
  EXPECT_NEAR(ld.back(), 0.999 + 0.001 * std::log(0.001), 1e-9);
  EXPECT_GT(ld.back(), 0.99);
}

TEST(CurveValues, GeneralizedLorenzIsMeanTimesLorenz) {
  std::mt19937_64 rng(11);
  const auto grid = DominanceGrid::standard();
  for (int rep = 0; rep < 10; ++rep) {
    const auto d = random_mixture(rng);
    const auto ld = curve_values(d, CurveKind::LD, grid);
    const auto gld = curve_values(d, CurveKind::GLD, grid);
    const double mu = MixtureEvaluator(d).mean();
    for (std::size_t i = 0; i < ld.size(); ++i) EXPECT_EQ(gld[i], mu * ld[i]);
  }
}

TEST(CurveValues, NondecreasingForAllKinds) {
  std::mt19937_64 rng(12);
  const auto grid = DominanceGrid::standard();
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = random_mixture(rng);
    for (auto kind : kAllCurveKinds) {
      const auto v = curve_values(d, kind, grid);
      EXPECT_TRUE(std::is_sorted(v.begin(), v.end())) << to_string(kind) << " rep " << rep;
    }
  }
}

TEST(CurveValues, RestrictedGridReturnsActiveSlice) {
  const auto grid = DominanceGrid::standard();
  const auto d = MixtureDraw::single(2.0, 3.0);
  const auto full = curve_values(d, CurveKind::FSD, grid);
  const auto part = curve_values(d, CurveKind::FSD, grid.restricted(0.1, 0.2));
  ASSERT_EQ(part.size(), 101u);
  for (std::size_t i = 0; i < part.size(); ++i) EXPECT_EQ(part[i], full[99 + i]);
}

TEST(DominanceProbabilities, ScaleFamilyIsOrdered) {
  const auto grid = DominanceGrid::standard();
  const auto x = repeated(MixtureDraw::single(2.0, 2.0), 20);
  const auto y = repeated(MixtureDraw::single(2.0, 1.0), 20);
  const auto r = dominance_probabilities(x, y, CurveKind::FSD, grid);
  EXPECT_EQ(r.p_x_over_y, 1.0);
  EXPECT_EQ(r.p_y_over_x, 0.0);
  EXPECT_EQ(r.p_neither, 0.0);
  EXPECT_EQ(r.m_used, 20u);
  EXPECT_EQ(r.tie_count, 0u);
  for (double v : r.curve_x_over_y.values) EXPECT_EQ(v, 1.0);
}

TEST(DominanceProbabilities, EqualMeanGammasLorenzOrderedButCrossing) {
  const auto grid = DominanceGrid::standard();
  const auto x = repeated(MixtureDraw::single(2.0, 1.0), 10);
  const auto y = repeated(MixtureDraw::single(0.5, 1.0), 10);
  const auto ld = dominance_probabilities(x, y, CurveKind::LD, grid);
  EXPECT_EQ(ld.p_x_over_y, 1.0);
  EXPECT_EQ(ld.p_y_over_x, 0.0);
  EXPECT_EQ(ld.p_neither, 0.0);
  const auto fsd = dominance_probabilities(x, y, CurveKind::FSD, grid);
  EXPECT_EQ(fsd.p_x_over_y, 0.0);
  EXPECT_EQ(fsd.p_y_over_x, 0.0);
  EXPECT_EQ(fsd.p_neither, 1.0);

  // Independent oracle: boost inverse gamma on a dense grid shows a sign change.
  int changes = 0;
  double prev = 0.0;
  for (int i = 1; i < 10000; ++i) {
    const double u = i / 10000.0;
    const double diff = boost::math::gamma_p_inv(2.0, u) / 2.0 - boost::math::gamma_p_inv(0.5, u) / 0.5;
    if (i > 1 && (diff > 0) != (prev > 0)) ++changes;
    prev = diff;
  }
  EXPECT_EQ(changes, 1);
}

TEST(DominanceProbabilities, EmptySampleThrows) {
  const auto grid = DominanceGrid::standard();
  const auto x = repeated(MixtureDraw::single(2.0, 1.0), 3);
  EXPECT_THROW(dominance_probabilities(PosteriorSample{}, x, CurveKind::FSD, grid), DomainError);
  EXPECT_THROW(dominance_probabilities(x, PosteriorSample{}, CurveKind::LD, grid), DomainError);
}

TEST(DominanceProbabilities, UsesShorterSample) {
  const auto grid = DominanceGrid::standard();
  const auto x = repeated(MixtureDraw::single(2.0, 2.0), 7);
  const auto y = repeated(MixtureDraw::single(2.0, 1.0), 4);
  EXPECT_EQ(dominance_probabilities(x, y, CurveKind::GLD, grid).m_used, 4u);
}

TEST(DominanceProbabilities, SelfComparisonCountsTiesBothWays) {
  std::mt19937_64 rng(3);
  const auto grid = DominanceGrid::standard();
  const auto x = jittered(rng, random_mixture(rng), 25, 1.0, 0.05);
  for (auto kind : kAllCurveKinds) {
    const auto r = dominance_probabilities(x, x, kind, grid);
    EXPECT_EQ(r.p_x_over_y, 1.0);
    EXPECT_EQ(r.p_y_over_x, 1.0);
    EXPECT_EQ(r.p_neither, 0.0);
    EXPECT_EQ(r.tie_count, 25u);
    for (double v : r.curve_x_over_y.values) EXPECT_EQ(v, 1.0);
  }
}

TEST(DominanceProbabilities, TableFromOtherGridRejected) {
  const auto x = repeated(MixtureDraw::single(2.0, 1.0), 3);
  const CurveTable a(x, DominanceGrid::standard(), {CurveKind::FSD});
  const CurveTable b(x, DominanceGrid({0.25, 0.5, 0.75}), {CurveKind::FSD});
  EXPECT_THROW(dominance_probabilities(a, b, CurveKind::FSD, DominanceGrid::standard()), DomainError);
  EXPECT_THROW(dominance_probabilities(a, a, CurveKind::LD, DominanceGrid::standard()), DomainError);
}

TEST(DominanceInvariants, RandomDrawSets) {
  const auto grid = DominanceGrid::standard();
  int interior = 0;  // guards against every case being trivially 0 or 1
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    const auto [x, y] = uncertain_pair(seed);
    const CurveTable tx(x, grid), ty(y, grid);
    for (auto kind : kAllCurveKinds) {
      SCOPED_TRACE(::testing::Message() << "seed " << seed << " kind " << to_string(kind));
      const auto r = dominance_probabilities(tx, ty, kind, grid);
      expect_identity_holds(r);
      interior += r.p_x_over_y > 0.0 && r.p_x_over_y < 1.0;
      const double curve_min = *std::min_element(r.curve_x_over_y.values.begin(), r.curve_x_over_y.values.end());
      EXPECT_LE(r.p_x_over_y, curve_min);

      const auto s = dominance_probabilities(ty, tx, kind, grid);
      EXPECT_EQ(s.p_x_over_y, r.p_y_over_x);
      EXPECT_EQ(s.p_y_over_x, r.p_x_over_y);

      for (auto [lo, hi] : {std::pair{0.04, 0.96}, std::pair{0.001, 0.1}, std::pair{0.5, 0.6}}) {
        const auto rr = dominance_probabilities(tx, ty, kind, grid.restricted(lo, hi));
        EXPECT_GE(rr.p_x_over_y, r.p_x_over_y);
        EXPECT_GE(rr.p_y_over_x, r.p_y_over_x);
      }
    }
  }
  EXPECT_GE(interior, 6);
}

TEST(DominanceInvariants, GeneralizedLorenzAtLeastFirstOrder) {
  const auto grid = DominanceGrid::standard();
  for (std::uint64_t seed = 200; seed < 206; ++seed) {
    const auto [x, y] = uncertain_pair(seed);
    const CurveTable tx(x, grid, {CurveKind::FSD, CurveKind::GLD}), ty(y, grid, {CurveKind::FSD, CurveKind::GLD});
    const auto fsd = dominance_probabilities(tx, ty, CurveKind::FSD, grid);
    const auto gld = dominance_probabilities(tx, ty, CurveKind::GLD, grid);
    EXPECT_GE(gld.p_x_over_y, fsd.p_x_over_y - 0.01) << seed;
    EXPECT_GE(gld.p_y_over_x, fsd.p_y_over_x - 0.01) << seed;
  }
}

TEST(DominanceInvariants, LorenzIgnoresCommonRescaling) {
  const auto grid = DominanceGrid::standard();
  const auto [x, y] = uncertain_pair(300);
  const auto base = dominance_probabilities(x, y, CurveKind::LD, grid);
  for (double factor : {2.0, 0.25}) {
    const auto r = dominance_probabilities(rescaled(x, factor), y, CurveKind::LD, grid);
    EXPECT_EQ(r.p_x_over_y, base.p_x_over_y);
    EXPECT_EQ(r.p_y_over_x, base.p_y_over_x);
    EXPECT_EQ(r.curve_x_over_y.values, base.curve_x_over_y.values);
  }
  // Non-binary factors perturb the last ulp of normalized means only.
  const auto r = dominance_probabilities(x, rescaled(y, 3.7), CurveKind::LD, grid);
  EXPECT_NEAR(r.p_x_over_y, base.p_x_over_y, 2.0 / x.size());
  EXPECT_NEAR(r.p_y_over_x, base.p_y_over_x, 2.0 / x.size());
}

TEST(ProbabilityCurve, CrossingPairHasTransition) {
  const auto grid = DominanceGrid::standard();
  const auto x = repeated(MixtureDraw::single(2.0, 1.0), 5);
  const auto y = repeated(MixtureDraw::single(0.5, 1.0), 5);
  const auto c = probability_curve(x, y, CurveKind::FSD, grid);
  ASSERT_EQ(c.values.size(), 999u);
  EXPECT_EQ(c.values.front(), 1.0);
  EXPECT_EQ(c.values.back(), 0.0);
  std::size_t flips = 0;
  for (std::size_t i = 1; i < c.values.size(); ++i) flips += c.values[i] != c.values[i - 1];
  EXPECT_EQ(flips, 1u);

  // The flip sits where the boost quantiles cross.
  std::size_t flip = 0;
  while (c.values[flip] == 1.0) ++flip;
  const double u_before = c.u[flip - 1], u_after = c.u[flip];
  auto diff = [](double u) {
    return boost::math::gamma_p_inv(2.0, u) / 2.0 - boost::math::gamma_p_inv(0.5, u) / 0.5;
  };
  EXPECT_GE(diff(u_before), 0.0);
  EXPECT_LT(diff(u_after), 0.0);
}

TEST(ProbabilityCurve, IdenticalDegenerateSamplesGiveOne) {
  const auto x = repeated(MixtureDraw::single(3.0, 2.0), 4);
  for (auto kind : kAllCurveKinds) {
    const auto c = probability_curve(x, x, kind, DominanceGrid::standard());
    for (double v : c.values) EXPECT_EQ(v, 1.0);
  }
}

TEST(RestrictedProbability, SinglePointMatchesCurve) {
  const auto [x, y] = uncertain_pair(400);
  const auto grid = DominanceGrid::standard();
  const auto curve = probability_curve(x, y, CurveKind::GLD, grid);
  for (std::size_t i : {0u, 137u, 500u, 998u}) {
    const double u = grid.points()[i];
    const auto r = restricted_probability(x, y, CurveKind::GLD, u, u);
    ASSERT_EQ(r.curve_x_over_y.u.size(), 1u);
    EXPECT_EQ(r.p_x_over_y, curve.values[i]);
  }
}

TEST(RestrictedProbability, FullRangeIsIdentity) {
  const auto [x, y] = uncertain_pair(401);
  const auto full = dominance_probabilities(x, y, CurveKind::FSD, DominanceGrid::standard());
  const auto r = restricted_probability(x, y, CurveKind::FSD, 0.001, 0.999);
  EXPECT_EQ(r.p_x_over_y, full.p_x_over_y);
  EXPECT_EQ(r.p_y_over_x, full.p_y_over_x);
  EXPECT_EQ(r.curve_x_over_y.values, full.curve_x_over_y.values);
}

TEST(RestrictedProbability, PoorestTenthOnCrossingPair) {
  const auto x = repeated(MixtureDraw::single(2.0, 1.0), 5);
  const auto y = repeated(MixtureDraw::single(0.5, 1.0), 5);
  const auto full = dominance_probabilities(x, y, CurveKind::FSD, DominanceGrid::standard());
  const auto poor = restricted_probability(x, y, CurveKind::FSD, 0.001, 0.1);
  EXPECT_GT(poor.p_x_over_y, full.p_x_over_y);
  EXPECT_EQ(poor.p_x_over_y, 1.0);
}

TEST(RestrictedProbability, EmptyRangeThrows) {
  const auto x = repeated(MixtureDraw::single(2.0, 1.0), 2);
  EXPECT_THROW(restricted_probability(x, x, CurveKind::FSD, 0.0101, 0.0109), DomainError);
  EXPECT_THROW(restricted_probability(x, x, CurveKind::FSD, 0.5, 0.4), DomainError);
}

TEST(Reordering, IsSeededPermutation) {
  const auto a = reordering(1000, 5, 0);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> iota(1000);
  std::iota(iota.begin(), iota.end(), std::size_t{0});
  EXPECT_EQ(sorted, iota);
  EXPECT_EQ(reordering(1000, 5, 0), a);
  EXPECT_NE(reordering(1000, 5, 1), a);
  EXPECT_NE(reordering(1000, 6, 0), a);
}

TEST(ReorderedProbabilities, IdentityOrderMatchesIndexPairing) {
  const auto grid = DominanceGrid::standard();
  const auto [x, y] = uncertain_pair(500);
  const CurveTable tx(x, grid), ty(y, grid);
  std::vector<std::size_t> identity(y.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  for (auto kind : kAllCurveKinds) {
    const auto a = dominance_probabilities(tx, ty, kind, grid);
    const auto b = reordered_probabilities(tx, ty, kind, grid, identity);
    EXPECT_EQ(a.p_x_over_y, b.p_x_over_y);
    EXPECT_EQ(a.p_y_over_x, b.p_y_over_x);
    EXPECT_EQ(a.curve_x_over_y.values, b.curve_x_over_y.values);
  }
  identity.pop_back();
  EXPECT_THROW(reordered_probabilities(tx, ty, CurveKind::FSD, grid, identity), DomainError);
}

TEST(RandomizedBounds, MatchesExplicitReorderings) {
  const auto grid = DominanceGrid::standard();
  const auto [x, y] = uncertain_pair(600);
  const CurveTable tx(x, grid), ty(y, grid);
  const std::size_t reps = 12;
  const auto b = randomized_bounds(tx, ty, CurveKind::GLD, grid, reps, 77);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto p = reordered_probabilities(tx, ty, CurveKind::GLD, grid, reordering(y.size(), 77, r)).p_x_over_y;
    lo = std::min(lo, p);
    hi = std::max(hi, p);
    sum += p;
  }
  EXPECT_EQ(b.x_over_y.min, lo);
  EXPECT_EQ(b.x_over_y.max, hi);
  EXPECT_DOUBLE_EQ(b.x_over_y.avg, sum / reps);
  EXPECT_LE(b.y_over_x.min, b.y_over_x.avg);
  EXPECT_LE(b.y_over_x.avg, b.y_over_x.max);
  EXPECT_LE(b.neither.min, b.neither.max);
  EXPECT_EQ(b.reorderings, reps);
  EXPECT_EQ(b.m_used, x.size());

  const auto again = randomized_bounds(x, y, CurveKind::GLD, grid, reps, 77);
  EXPECT_EQ(again.x_over_y.avg, b.x_over_y.avg);
  EXPECT_EQ(again.neither.max, b.neither.max);
}

TEST(RandomizedBounds, DegenerateSamplesHaveNoSpread) {
  const auto grid = DominanceGrid::standard();
  const auto x = repeated(MixtureDraw::single(2.0, 2.0), 50);
  const auto y = repeated(MixtureDraw::single(1.5, 1.9), 50);
  for (auto kind : kAllCurveKinds) {
    const auto b = randomized_bounds(x, y, kind, grid, 20, 1);
    EXPECT_EQ(b.x_over_y.min, b.x_over_y.max);
    EXPECT_DOUBLE_EQ(b.x_over_y.avg, b.x_over_y.min);
    EXPECT_EQ(b.neither.min, b.neither.max);
  }
}

TEST(RandomizedBounds, ZeroReorderingsRejected) {
  const auto x = repeated(MixtureDraw::single(2.0, 2.0), 5);
  EXPECT_THROW(randomized_bounds(x, x, CurveKind::FSD, DominanceGrid::standard(), 0, 1), DomainError);
}
