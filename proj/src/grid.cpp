#include "gmdom/grid.hpp"

#include <algorithm>
#include <cmath>

#include "gmdom/errors.hpp"

namespace gmdom {

DominanceGrid DominanceGrid::standard() {
  std::vector<double> points;
  points.reserve(999);
  for (int i = 1; i <= 999; ++i) points.push_back(i / 1000.0);
  return DominanceGrid(std::move(points));
}

DominanceGrid::DominanceGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw DomainError("dominance grid must contain at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double u = points_[i];
    if (!(u > 0.0 && u < 1.0)) throw DomainError("dominance grid points must lie in (0, 1)");
    if (i > 0 && !(u > points_[i - 1])) throw DomainError("dominance grid points must be strictly increasing");
  }
  end_ = points_.size();
}

DominanceGrid DominanceGrid::restricted(double lower, double upper) const {
  if (!(lower > 0.0 && lower <= upper && upper < 1.0)) {
    throw DomainError("restriction must satisfy 0 < u_min <= u_max < 1");
  }
  DominanceGrid out = *this;
  const auto first = std::lower_bound(points_.begin(), points_.end(), lower);
  const auto last = std::upper_bound(points_.begin(), points_.end(), upper);
  if (first >= last) throw DomainError("restriction selects no grid points");
  out.begin_ = static_cast<std::size_t>(first - points_.begin());
  out.end_ = static_cast<std::size_t>(last - points_.begin());
  out.restriction_ = Restriction{lower, upper};
  return out;
}

}  // namespace gmdom
