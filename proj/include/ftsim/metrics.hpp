#pragma once

#include <cmath>

#include "ftsim/common.hpp"
#include "ftsim/trajectory.hpp"

namespace ftsim {

/// Time-average queue length over [t0, t1].
inline Real average_queue(const Trajectory& traj, int i, Real t0, Real t1) {
  if (!(t1 > t0)) throw WindowNotCovered("empty averaging window");
  return traj.integral_x(i, t0, t1) / (t1 - t0);
}

/// Queue time per served vehicle over [t0, t1]: integral of x divided by the
/// throughput.  Free-flow link travel time is not included.
inline Real delay_per_vehicle(const Trajectory& traj, int i, Real t0, Real t1) {
  const Real served = traj.integral_b(i, t0, t1);
  if (served <= 0) throw NoThroughput("no vehicles served in the window");
  return traj.integral_x(i, t0, t1) / served;
}

/// Cumulative unused service accrued over [t0, t1].
inline Real wasted_green(const Trajectory& traj, int i, Real t0, Real t1) {
  return traj.v_at(i, t1) - traj.v_at(i, t0);
}

/// Inputs to the classical fixed-time delay approximation.
struct WebsterInput {
  Real cycle = 1;  // T
  Real green = 1;  // g
  Real flow = 1;   // q
  Real ratio = 0;  // flow-to-capacity ratio x
};

/// Webster's per-vehicle delay approximation:
///   d = T(1-g/T)^2 / (2[1-(g/T)x]) + x^2/(2q(1-x)) - 0.65 (T/q^2)^{1/3} x^{2+5g/T}.
inline Real webster_delay(const WebsterInput& w) {
  if (!(w.green > 0) || w.green > w.cycle)
    throw DomainError("green time must lie in (0, cycle]");
  if (!(w.flow > 0)) throw DomainError("flow must be positive");
  if (w.ratio < 0 || w.ratio >= 1) throw DomainError("flow-to-capacity ratio must be in [0, 1)");
  const Real gt = w.green / w.cycle;
  const Real uniform = w.cycle * (1 - gt) * (1 - gt) / (2 * (1 - gt * w.ratio));
  const Real overflow = w.ratio * w.ratio / (2 * w.flow * (1 - w.ratio));
  const Real correction =
      0.65 * std::cbrt(w.cycle / (w.flow * w.flow)) * std::pow(w.ratio, 2 + 5 * gt);
  return uniform + overflow - correction;
}

}  // namespace ftsim
