#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "ftsim/common.hpp"

namespace ftsim {

/// Continuous piecewise-linear function on [start_time, end_time], stored as
/// breakpoints with strictly increasing times.  Queries interpolate.
class PiecewiseLinearPath {
 public:
  struct Point {
    Real t = 0;
    Real value = 0;
    bool operator==(const Point&) const = default;
  };

  PiecewiseLinearPath() = default;
  explicit PiecewiseLinearPath(std::vector<Point> points) : points_(std::move(points)) {}

  static PiecewiseLinearPath line(Real t0, Real v0, Real t1, Real v1) {
    return PiecewiseLinearPath({{t0, v0}, {t1, v1}});
  }

  [[nodiscard]] const std::vector<Point>& points() const { return points_; }
  [[nodiscard]] bool empty() const { return points_.empty(); }
  [[nodiscard]] Real start_time() const { return points_.front().t; }
  [[nodiscard]] Real end_time() const { return points_.back().t; }

  void append(Real t, Real value) {
    if (!points_.empty() && t <= points_.back().t) {
      points_.back().value = value;  // same-instant overwrite
      return;
    }
    points_.push_back({t, value});
  }

  [[nodiscard]] Real value_at(Real t) const {
    const auto [k, lo, hi] = segment(t);
    if (hi.t == lo.t) return lo.value;
    const Real w = (t - lo.t) / (hi.t - lo.t);
    return lo.value + w * (hi.value - lo.value);
  }

  /// Exact integral over [t0, t1] (trapezoids on the stored segments).
  [[nodiscard]] Real integral(Real t0, Real t1) const {
    if (t1 <= t0) return 0.0;
    Real total = 0;
    for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
      const Real lo = std::max(t0, points_[k].t);
      const Real hi = std::min(t1, points_[k + 1].t);
      if (hi <= lo) continue;
      total += 0.5 * (value_on_segment(k, lo) + value_on_segment(k, hi)) * (hi - lo);
    }
    return total;
  }

  [[nodiscard]] Real min_value() const {
    Real m = points_.front().value;
    for (const auto& p : points_) m = std::min(m, p.value);
    return m;
  }

  [[nodiscard]] Real max_value() const {
    Real m = points_.front().value;
    for (const auto& p : points_) m = std::max(m, p.value);
    return m;
  }

  [[nodiscard]] bool covers(Real t0, Real t1, Real tol = kTol) const {
    return !points_.empty() && start_time() <= t0 + tol && end_time() >= t1 - tol;
  }

 private:
  std::tuple<std::size_t, Point, Point> segment(Real t) const {
    if (points_.size() == 1) return {0, points_[0], points_[0]};
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](Real x, const Point& p) { return x < p.t; });
    std::size_t k = (it == points_.begin()) ? 0 : (it - points_.begin() - 1);
    if (k + 1 >= points_.size()) k = points_.size() - 2;
    return {k, points_[k], points_[k + 1]};
  }

  Real value_on_segment(std::size_t k, Real t) const {
    const auto& lo = points_[k];
    const auto& hi = points_[k + 1];
    const Real w = (t - lo.t) / (hi.t - lo.t);
    return lo.value + w * (hi.value - lo.value);
  }

  std::vector<Point> points_;
};

/// Exact sup-norm distance between two paths on a common domain.  The
/// difference is piecewise linear, so the maximum is attained at a breakpoint
/// of either path.
[[nodiscard]] inline Real sup_distance(const PiecewiseLinearPath& p, const PiecewiseLinearPath& q) {
  if (p.empty() || q.empty()) throw DomainMismatch("sup_distance on empty path");
  if (!nearly_equal(p.start_time(), q.start_time()) || !nearly_equal(p.end_time(), q.end_time()))
    throw DomainMismatch("sup_distance requires equal domains");
  Real best = 0;
  for (const auto& pt : p.points()) best = std::max(best, std::abs(pt.value - q.value_at(pt.t)));
  for (const auto& pt : q.points()) best = std::max(best, std::abs(p.value_at(pt.t) - pt.value));
  return best;
}

}  // namespace ftsim
