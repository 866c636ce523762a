#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "ftsim/common.hpp"

namespace ftsim {

/// Right-continuous step function: value_at(t) is the value of the last step
/// whose time is <= t.  Queries before the first step throw HistoryGap.
class StepFunction {
 public:
  struct Step {
    Real t = 0;
    Real value = 0;
    bool operator==(const Step&) const = default;
  };

  StepFunction() = default;
  explicit StepFunction(std::vector<Step> steps) : steps_(std::move(steps)) {}

  static StepFunction constant(Real from, Real value) {
    return StepFunction({{from, value}});
  }

  [[nodiscard]] const std::vector<Step>& steps() const { return steps_; }
  [[nodiscard]] bool empty() const { return steps_.empty(); }
  [[nodiscard]] Real domain_start() const { return steps_.front().t; }
  [[nodiscard]] Real last_time() const { return steps_.back().t; }
  [[nodiscard]] Real last_value() const { return steps_.back().value; }

  /// Append a step; a step at (or before, within tol) the last time overwrites it.
  void append(Real t, Real value, Real tol = 0.0) {
    if (!steps_.empty() && t <= steps_.back().t + tol) {
      steps_.back().value = value;
      return;
    }
    steps_.push_back({t, value});
  }

  /// Drop consecutive steps with equal values.
  void compress(Real tol = 0.0) {
    std::vector<Step> out;
    for (const auto& s : steps_) {
      if (!out.empty() && std::abs(out.back().value - s.value) <= tol) continue;
      out.push_back(s);
    }
    steps_ = std::move(out);
  }

  [[nodiscard]] Real value_at(Real t, Real tol = kTol) const {
    if (steps_.empty() || t < steps_.front().t - tol)
      throw HistoryGap("step function queried before its domain");
    // Queries within roundoff of a step time read the step's value, so lag
    // arithmetic like (s + d) - d cannot fall on the stale side.
    const Real snapped = t + snap_width(t);
    auto it = std::upper_bound(steps_.begin(), steps_.end(), snapped,
                               [](Real x, const Step& s) { return x < s.t; });
    if (it == steps_.begin()) return steps_.front().value;
    return (it - 1)->value;
  }

  /// Left limit at t: the value on the interval ending at t.
  [[nodiscard]] Real value_before(Real t, Real tol = kTol) const {
    if (steps_.empty() || t <= steps_.front().t - tol)
      throw HistoryGap("step function queried before its domain");
    const Real snapped = t - snap_width(t);
    auto it = std::lower_bound(steps_.begin(), steps_.end(), snapped,
                               [](const Step& s, Real x) { return s.t < x; });
    if (it == steps_.begin()) return steps_.front().value;
    return (it - 1)->value;
  }

  /// Exact integral over [t0, t1]; the function is extended by its last value.
  [[nodiscard]] Real integral(Real t0, Real t1) const {
    if (t1 <= t0) return 0.0;
    if (steps_.empty() || t0 < steps_.front().t - kTol)
      throw HistoryGap("step integral outside domain");
    Real total = 0;
    for (std::size_t k = 0; k < steps_.size(); ++k) {
      const Real lo = std::max(t0, steps_[k].t);
      const Real hi = std::min(t1, (k + 1 < steps_.size()) ? steps_[k + 1].t : t1);
      if (hi > lo) total += steps_[k].value * (hi - lo);
    }
    return total;
  }

  /// Step times strictly inside (t0, t1).
  [[nodiscard]] std::vector<Real> breakpoints_in(Real t0, Real t1) const {
    std::vector<Real> out;
    for (const auto& s : steps_)
      if (s.t > t0 && s.t < t1) out.push_back(s.t);
    return out;
  }

  /// Restrict to [t0, t1] and shift times by `shift`.
  [[nodiscard]] StepFunction window(Real t0, Real t1, Real shift = 0.0) const {
    StepFunction out;
    out.append(t0 + shift, value_at(t0));
    for (const auto& s : steps_) {
      if (s.t > t0 && s.t <= t1) out.append(s.t + shift, s.value);
    }
    return out;
  }

  bool operator==(const StepFunction&) const = default;

 private:
  static Real snap_width(Real t) { return 1e-12 * std::max<Real>(1.0, std::abs(t)); }

  std::vector<Step> steps_;
};

}  // namespace ftsim
