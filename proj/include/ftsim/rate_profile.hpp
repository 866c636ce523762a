#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ftsim/common.hpp"

namespace ftsim {

/// Periodic piecewise-constant nonnegative rate function.
///
/// A profile is a list of (start, rate) pieces with start times strictly
/// increasing in [0, period), the first piece starting at 0.  Evaluation is
/// right-continuous and extends periodically to all of the real line.
class RateProfile {
 public:
  struct Piece {
    Real start = 0;
    Real rate = 0;
    bool operator==(const Piece&) const = default;
  };

  RateProfile() : period_(1.0), pieces_{{0.0, 0.0}} {}

  RateProfile(Real period, std::vector<Piece> pieces)
      : period_(period), pieces_(std::move(pieces)) {}

  static RateProfile constant(Real period, Real rate) {
    return RateProfile(period, {{0.0, rate}});
  }

  [[nodiscard]] Real period() const { return period_; }
  [[nodiscard]] const std::vector<Piece>& pieces() const { return pieces_; }

  /// Structural problems, empty when the profile is well formed.
  [[nodiscard]] std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (!(period_ > 0) || !is_finite(period_)) out.push_back("period must be positive and finite");
    if (pieces_.empty()) out.push_back("profile has no pieces");
    if (!pieces_.empty() && pieces_.front().start != 0.0)
      out.push_back("first piece must start at 0");
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      const auto& p = pieces_[k];
      if (!is_finite(p.start) || p.start < 0 || (is_finite(period_) && p.start >= period_))
        out.push_back("piece start outside [0, period)");
      if (k > 0 && !(p.start > pieces_[k - 1].start))
        out.push_back("piece starts must be strictly increasing");
      if (!is_finite(p.rate) || p.rate < 0) out.push_back("rate must be nonnegative and finite");
    }
    return out;
  }

  /// Right-continuous periodic lookup.  Times within `snap` of a breakpoint
  /// are treated as exactly on it, so event times produced by
  /// next_breakpoint_after() read the post-break rate.
  [[nodiscard]] Real value_at(Real t, Real snap = kSnapTol) const {
    const Real local = fold(t, snap);
    std::size_t k = pieces_.size() - 1;
    while (k > 0 && pieces_[k].start > local) --k;
    return pieces_[k].rate;
  }

  /// Exact integral over [t0, t1].
  [[nodiscard]] Real integral(Real t0, Real t1) const {
    if (t1 <= t0) return 0.0;
    const Real per = integral_one_period();
    const Real k0 = std::floor(t0 / period_);
    const Real k1 = std::floor(t1 / period_);
    if (k0 == k1) return partial(t0 - k0 * period_, t1 - k0 * period_);
    Real total = partial(t0 - k0 * period_, period_);
    total += per * (k1 - k0 - 1);
    total += partial(0.0, t1 - k1 * period_);
    return total;
  }

  /// Time-average rate over one period.
  [[nodiscard]] Real mean() const { return integral_one_period() / period_; }

  [[nodiscard]] Real max_rate() const {
    Real m = 0;
    for (const auto& p : pieces_) m = std::max(m, p.rate);
    return m;
  }

  /// First breakpoint strictly after t, with periodic continuation.
  [[nodiscard]] Real next_breakpoint_after(Real t, Real snap = kSnapTol) const {
    const Real local = fold(t, snap);
    const Real base = t - local;
    for (const auto& p : pieces_) {
      if (p.start > local + snap_width(t, snap)) return base + p.start;
    }
    return base + period_;
  }

  /// Profile shifted right by `offset`: shifted.value_at(t) == value_at(t - offset).
  [[nodiscard]] RateProfile shifted(Real offset) const {
    std::vector<Piece> moved;
    moved.reserve(pieces_.size() + 1);
    for (const auto& p : pieces_) {
      Real s = std::fmod(p.start + offset, period_);
      if (s < 0) s += period_;
      if (nearly_equal(s, period_, kSnapTol)) s = 0.0;
      moved.push_back({s, p.rate});
    }
    std::sort(moved.begin(), moved.end(),
              [](const Piece& a, const Piece& b) { return a.start < b.start; });
    if (moved.front().start > 0.0) {
      // The piece wrapping around the period boundary covers t = 0.
      moved.insert(moved.begin(), {0.0, moved.back().rate});
    }
    // Merge pieces that landed on the same start.
    std::vector<Piece> out;
    for (const auto& p : moved) {
      if (!out.empty() && nearly_equal(out.back().start, p.start, kSnapTol)) {
        out.back().rate = p.rate;
      } else {
        out.push_back(p);
      }
    }
    return RateProfile(period_, std::move(out));
  }

  [[nodiscard]] RateProfile scaled(Real factor) const {
    std::vector<Piece> out = pieces_;
    for (auto& p : out) p.rate *= factor;
    return RateProfile(period_, std::move(out));
  }

  bool operator==(const RateProfile&) const = default;

 private:
  // Snap width used to attribute values at breakpoints reached through
  // accumulated floating-point event times.
  static constexpr Real kSnapTol = 1e-12;

  static Real snap_width(Real t, Real snap) { return snap * std::max<Real>(1.0, std::abs(t)); }

  [[nodiscard]] Real fold(Real t, Real snap) const {
    Real local = t - period_ * std::floor(t / period_);
    const Real w = snap_width(t, snap);
    if (local >= period_ - w) local = 0.0;  // landed on the next period start
    else {
      for (const auto& p : pieces_) {
        if (std::abs(local - p.start) <= w) {
          local = p.start;
          break;
        }
      }
    }
    return local;
  }

  [[nodiscard]] Real integral_one_period() const { return partial(0.0, period_); }

  // Integral over [a, b] with 0 <= a <= b <= period.
  [[nodiscard]] Real partial(Real a, Real b) const {
    Real total = 0;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      const Real lo = pieces_[k].start;
      const Real hi = (k + 1 < pieces_.size()) ? pieces_[k + 1].start : period_;
      const Real from = std::max(a, lo);
      const Real to = std::min(b, hi);
      if (to > from) total += pieces_[k].rate * (to - from);
    }
    return total;
  }

  Real period_;
  std::vector<Piece> pieces_;
};

}  // namespace ftsim
