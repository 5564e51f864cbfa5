#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gmdom {

struct Restriction {
  double lower;
  double upper;
};

/// Population-proportion grid on which curves are compared.
///
/// The full point set is always kept; a restriction only selects the
/// contiguous run of points with lower <= u <= upper. Curves are evaluated on
/// the full point set so that restricted and unrestricted comparisons see
/// identical values at shared points.
class DominanceGrid {
 public:
  /// u_i = i / 1000 for i = 1..999.
  static DominanceGrid standard();

  /// Strictly increasing points in (0, 1); throws DomainError otherwise.
  explicit DominanceGrid(std::vector<double> points);

  /// Copy restricted to [lower, upper]. Requires 0 < lower <= upper < 1 and
  /// at least one point in range.
  DominanceGrid restricted(double lower, double upper) const;

  // Spans into the grid; deleted on temporaries so they cannot dangle.
  std::span<const double> points() const& noexcept { return points_; }
  std::span<const double> points() const&& = delete;
  std::span<const double> active_points() const& noexcept {
    return std::span<const double>(points_).subspan(begin_, end_ - begin_);
  }
  std::span<const double> active_points() const&& = delete;
  std::size_t active_begin() const noexcept { return begin_; }
  std::size_t active_end() const noexcept { return end_; }
  std::size_t active_size() const noexcept { return end_ - begin_; }
  bool is_restricted() const noexcept { return restriction_.has_value(); }
  const std::optional<Restriction>& restriction() const noexcept { return restriction_; }

 private:
  std::vector<double> points_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  std::optional<Restriction> restriction_;
};

}  // namespace gmdom
