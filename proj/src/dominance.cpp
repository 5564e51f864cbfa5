#include "gmdom/dominance.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <string>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>

#include "gmdom/errors.hpp"
#include "gmdom/gamma_mixture.hpp"
#include "gmdom/parallel.hpp"
#include "gmdom/survey_bootstrap.hpp"

namespace gmdom {

namespace {

constexpr std::uint64_t kReorderTag = 0x5245'4f52'4445'5253ULL;
constexpr std::size_t kChunk = 256;

void check_pair(const CurveTable& x, const CurveTable& y, CurveKind kind, const DominanceGrid& grid) {
  if (x.draws() == 0 || y.draws() == 0) throw DomainError("dominance: empty posterior sample");
  if (!x.has(kind) || !y.has(kind))
    throw DomainError(fmt::format("dominance: curve table lacks {} ordinates", to_string(kind)));
  auto p = grid.points();
  auto same = [&](std::span<const double> q) { return std::equal(p.begin(), p.end(), q.begin(), q.end()); };
  if (!same(x.points()) || !same(y.points())) throw DomainError("dominance: curve table built on a different grid");
}

struct PairOutcome {
  bool x_ge = true;
  bool y_ge = true;
};

// Both directions in one pass; stops once neither can hold.
PairOutcome compare_rows(std::span<const double> a, std::span<const double> b, std::size_t lo, std::size_t hi) {
  PairOutcome out;
  for (std::size_t i = lo; i < hi; ++i) {
    if (a[i] < b[i]) out.x_ge = false;
    if (b[i] < a[i]) out.y_ge = false;
    if (!out.x_ge && !out.y_ge) break;
  }
  return out;
}

struct Counts {
  std::size_t x_over_y = 0;
  std::size_t y_over_x = 0;
  std::size_t ties = 0;
};

template <typename Index>
Counts count_dominance(const CurveTable& x, const CurveTable& y, CurveKind kind, const DominanceGrid& grid,
                       std::size_t m, Index y_index) {
  const std::size_t chunks = (m + kChunk - 1) / kChunk;
  std::vector<Counts> partial(chunks);
  detail::parallel_for(chunks, [&](std::size_t c) {
    Counts local;
    const std::size_t end = std::min(m, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) {
      auto r = compare_rows(x.row(kind, k), y.row(kind, y_index(k)), grid.active_begin(), grid.active_end());
      local.x_over_y += r.x_ge;
      local.y_over_x += r.y_ge;
      local.ties += r.x_ge && r.y_ge;
    }
    partial[c] = local;
  });
  Counts total;
  for (const auto& p : partial) {
    total.x_over_y += p.x_over_y;
    total.y_over_x += p.y_over_x;
    total.ties += p.ties;
  }
  return total;
}

template <typename Index>
std::vector<std::size_t> count_curve(const CurveTable& x, const CurveTable& y, CurveKind kind,
                                     const DominanceGrid& grid, std::size_t m, Index y_index) {
  const std::size_t lo = grid.active_begin();
  const std::size_t width = grid.active_size();
  const std::size_t chunks = (m + kChunk - 1) / kChunk;
  std::vector<std::vector<std::size_t>> partial(chunks);
  detail::parallel_for(chunks, [&](std::size_t c) {
    std::vector<std::size_t> local(width, 0);
    const std::size_t end = std::min(m, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) {
      auto a = x.row(kind, k);
      auto b = y.row(kind, y_index(k));
      for (std::size_t i = 0; i < width; ++i) local[i] += a[lo + i] >= b[lo + i];
    }
    partial[c] = std::move(local);
  });
  std::vector<std::size_t> total(width, 0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < width; ++i) total[i] += p[i];
  return total;
}

DominanceResult assemble(const Counts& counts, const std::vector<std::size_t>& curve_counts,
                         const DominanceGrid& grid, std::size_t m) {
  DominanceResult out;
  const double denom = static_cast<double>(m);
  out.m_used = m;
  out.tie_count = counts.ties;
  out.p_x_over_y = static_cast<double>(counts.x_over_y) / denom;
  out.p_y_over_x = static_cast<double>(counts.y_over_x) / denom;
  out.p_neither = std::clamp(1.0 - out.p_x_over_y - out.p_y_over_x, 0.0, 1.0);
  auto active = grid.active_points();
  out.curve_x_over_y.u.assign(active.begin(), active.end());
  out.curve_x_over_y.values.reserve(curve_counts.size());
  for (auto c : curve_counts) out.curve_x_over_y.values.push_back(static_cast<double>(c) / denom);
  return out;
}

void fill_row(std::span<double> dst, const DrawCurves& c, CurveKind kind) {
  const auto& src = kind == CurveKind::FSD ? c.quantile : c.lorenz;
  if (kind == CurveKind::GLD) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = c.mean * src[i];
  } else {
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

}  // namespace

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::FSD: return "fsd";
    case CurveKind::GLD: return "gld";
    case CurveKind::LD: return "ld";
  }
  return "?";
}

CurveKind parse_curve_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto kind : kAllCurveKinds)
    if (lower == to_string(kind)) return kind;
  throw ConfigError(fmt::format("unknown curve kind '{}' (expected fsd, gld or ld)", text));
}

CurveTable::CurveTable(const PosteriorSample& sample, const DominanceGrid& grid,
                       std::initializer_list<CurveKind> kinds)
    : draws_(sample.size()), points_(grid.points().begin(), grid.points().end()) {
  const std::size_t g = points_.size();
  for (auto kind : kinds) values_[index(kind)].assign(draws_ * g, 0.0);
  detail::parallel_for(draws_, [&](std::size_t m) {
    const auto curves = MixtureEvaluator(sample.draws[m]).curves(points_);
    for (auto kind : kAllCurveKinds) {
      auto& table = values_[index(kind)];
      if (!table.empty()) fill_row(std::span<double>(table).subspan(m * g, g), curves, kind);
    }
  });
}

std::span<const double> CurveTable::row(CurveKind kind, std::size_t draw) const {
  const auto& table = values_[index(kind)];
  if (table.empty()) throw DomainError(fmt::format("curve table has no {} ordinates", to_string(kind)));
  return std::span<const double>(table).subspan(draw * points_.size(), points_.size());
}

std::vector<double> curve_values(const MixtureDraw& draw, CurveKind kind, const DominanceGrid& grid) {
  const auto curves = MixtureEvaluator(draw).curves(grid.points());
  std::vector<double> all(grid.points().size());
  fill_row(all, curves, kind);
  return {all.begin() + static_cast<std::ptrdiff_t>(grid.active_begin()),
          all.begin() + static_cast<std::ptrdiff_t>(grid.active_end())};
}

DominanceResult dominance_probabilities(const CurveTable& x, const CurveTable& y, CurveKind kind,
                                        const DominanceGrid& grid) {
  check_pair(x, y, kind, grid);
  const std::size_t m = std::min(x.draws(), y.draws());
  auto same = [](std::size_t k) { return k; };
  return assemble(count_dominance(x, y, kind, grid, m, same), count_curve(x, y, kind, grid, m, same), grid, m);
}

DominanceResult dominance_probabilities(const PosteriorSample& x, const PosteriorSample& y, CurveKind kind,
                                        const DominanceGrid& grid) {
  if (x.empty() || y.empty()) throw DomainError("dominance: empty posterior sample");
  return dominance_probabilities(CurveTable(x, grid, {kind}), CurveTable(y, grid, {kind}), kind, grid);
}

DominanceResult reordered_probabilities(const CurveTable& x, const CurveTable& y, CurveKind kind,
                                        const DominanceGrid& grid, std::span<const std::size_t> y_order) {
  check_pair(x, y, kind, grid);
  const std::size_t m = std::min(x.draws(), y.draws());
  if (y_order.size() < m) throw DomainError("dominance: reordering shorter than the number of pairs");
  for (std::size_t k = 0; k < m; ++k)
    if (y_order[k] >= y.draws()) throw DomainError("dominance: reordering index out of range");
  auto index = [&](std::size_t k) { return y_order[k]; };
  return assemble(count_dominance(x, y, kind, grid, m, index), count_curve(x, y, kind, grid, m, index), grid, m);
}

ProbabilityCurve probability_curve(const CurveTable& x, const CurveTable& y, CurveKind kind,
                                   const DominanceGrid& grid) {
  check_pair(x, y, kind, grid);
  const std::size_t m = std::min(x.draws(), y.draws());
  return assemble({}, count_curve(x, y, kind, grid, m, [](std::size_t k) { return k; }), grid, m).curve_x_over_y;
}

ProbabilityCurve probability_curve(const PosteriorSample& x, const PosteriorSample& y, CurveKind kind,
                                   const DominanceGrid& grid) {
  if (x.empty() || y.empty()) throw DomainError("dominance: empty posterior sample");
  return probability_curve(CurveTable(x, grid, {kind}), CurveTable(y, grid, {kind}), kind, grid);
}

DominanceResult restricted_probability(const PosteriorSample& x, const PosteriorSample& y, CurveKind kind,
                                       double u_lo, double u_hi) {
  return dominance_probabilities(x, y, kind, DominanceGrid::standard().restricted(u_lo, u_hi));
}

std::vector<std::size_t> reordering(std::size_t n, std::uint64_t seed, std::size_t r) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  boost::random::mt19937_64 rng(derive_seed(seed, kReorderTag, r));
  for (std::size_t i = n; i > 1; --i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  return order;
}

RandomizedBounds randomized_bounds(const CurveTable& x, const CurveTable& y, CurveKind kind, const DominanceGrid& grid,
                                   std::size_t reorderings, std::uint64_t seed) {
  check_pair(x, y, kind, grid);
  if (reorderings == 0) throw DomainError("randomized_bounds: at least one reordering is required");
  const std::size_t m = std::min(x.draws(), y.draws());

  // Reorderings are the parallel unit here; the inner count runs serially.
  std::vector<Counts> per(reorderings);
  detail::parallel_for(reorderings, [&](std::size_t r) {
    const auto order = reordering(y.draws(), seed, r);
    Counts c;
    for (std::size_t k = 0; k < m; ++k) {
      auto o = compare_rows(x.row(kind, k), y.row(kind, order[k]), grid.active_begin(), grid.active_end());
      c.x_over_y += o.x_ge;
      c.y_over_x += o.y_ge;
    }
    per[r] = c;
  });

  RandomizedBounds out;
  out.reorderings = reorderings;
  out.m_used = m;
  out.x_over_y = out.y_over_x = out.neither = {1.0, 0.0, 0.0};
  const double denom = static_cast<double>(m);
  for (const auto& c : per) {
    const double px = static_cast<double>(c.x_over_y) / denom;
    const double py = static_cast<double>(c.y_over_x) / denom;
    const double pn = std::clamp(1.0 - px - py, 0.0, 1.0);
    for (auto [b, v] : {std::pair{&out.x_over_y, px}, std::pair{&out.y_over_x, py}, std::pair{&out.neither, pn}}) {
      b->min = std::min(b->min, v);
      b->max = std::max(b->max, v);
      b->avg += v;
    }
  }
  for (auto* b : {&out.x_over_y, &out.y_over_x, &out.neither}) b->avg /= static_cast<double>(reorderings);
  return out;
}

RandomizedBounds randomized_bounds(const PosteriorSample& x, const PosteriorSample& y, CurveKind kind,
                                   const DominanceGrid& grid, std::size_t reorderings, std::uint64_t seed) {
  if (x.empty() || y.empty()) throw DomainError("dominance: empty posterior sample");
  return randomized_bounds(CurveTable(x, grid, {kind}), CurveTable(y, grid, {kind}), kind, grid, reorderings, seed);
}

}  // namespace gmdom
