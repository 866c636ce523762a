#pragma once

#include <algorithm>
#include <cmath>

#include "ftsim/common.hpp"
#include "ftsim/piecewise_linear.hpp"

namespace ftsim {

/// Output of the one-dimensional reflection map: queue path x = u + v and the
/// nondecreasing compensator v (cumulative unused service).  Both paths share
/// their breakpoint times.
struct ReflectionResult {
  PiecewiseLinearPath x;
  PiecewiseLinearPath v;
};

/// One-dimensional Skorokhod reflection of a piecewise-linear net-input path:
///   v(t) = max(0, sup_{s<=t} -u(s)),   x(t) = u(t) + v(t).
///
/// v grows exactly on the closures of the intervals where u runs below its
/// previous running minimum; there x == 0.  Zero-crossing times are computed
/// in closed form per segment, so the result is exact for exact inputs.
inline ReflectionResult skorokhod(const PiecewiseLinearPath& u) {
  const auto& pts = u.points();
  if (pts.empty()) throw DomainMismatch("skorokhod needs a nonempty path");
  if (pts.front().value < 0)
    throw NegativeInitialCondition("net input starts below zero");

  ReflectionResult out;
  Real running_min = 0.0;  // min(0, min_{s<=t} u(s)); v = -running_min
  out.x.append(pts.front().t, pts.front().value);
  out.v.append(pts.front().t, 0.0);

  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const auto& a = pts[k];
    const auto& b = pts[k + 1];
    if (b.value < running_min) {
      // The segment dips below the running minimum: x hits zero at t* and v
      // tracks -u from there on.
      if (a.value > running_min) {
        const Real t_star = a.t + (running_min - a.value) * (b.t - a.t) / (b.value - a.value);
        if (t_star > a.t && t_star < b.t) {
          out.x.append(t_star, 0.0);
          out.v.append(t_star, -running_min);
        }
      }
      running_min = b.value;
      out.x.append(b.t, 0.0);
      out.v.append(b.t, -running_min);
    } else {
      out.x.append(b.t, b.value - running_min);
      out.v.append(b.t, -running_min);
    }
  }
  return out;
}

}  // namespace ftsim
