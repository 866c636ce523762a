#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ftsim/common.hpp"
#include "ftsim/network.hpp"
#include "ftsim/simulator.hpp"
#include "ftsim/stability.hpp"
#include "ftsim/state.hpp"
#include "ftsim/trajectory.hpp"

namespace ftsim {

enum class ConvergenceType { ExactFiniteTime, GeometricToTolerance };

struct OrbitConvergence {
  ConvergenceType type = ConvergenceType::ExactFiniteTime;
  /// Index of the first iterate that was already the fixed point.
  int settled_after = 0;
  /// Median of the last successive-distance ratios (cyclic routing only).
  Real contraction_rate = 0;
};

/// The unique periodic trajectory: fixed point of the one-period state map,
/// anchored at phase 0, together with one period of its trajectory.
struct PeriodicOrbit {
  NetworkState anchor;
  Trajectory cycle;
  int iterations = 0;  // one-period map applications performed
  OrbitConvergence convergence;
  std::vector<Real> iterate_distances;
};

namespace detail {

inline NetworkState advance_one_period(const Network& net, const NetworkState& state,
                                       const SimOptions& opts) {
  return simulate(net, state, net.period(), opts).final_state();
}

/// Largest amount by which `lo`'s aligned cumulative departures exceed `hi`'s.
inline Real history_order_violation(const NetworkState& lo, const NetworkState& hi) {
  Real worst = 0;
  for (std::size_t i = 0; i < lo.departures.size(); ++i) {
    const auto& h1 = lo.departures[i];
    const auto& h2 = hi.departures[i];
    if (h1.empty() || h2.empty()) continue;
    const Real start = std::max(h1.domain_start(), h2.domain_start());
    std::vector<Real> grid{start, 0.0};
    for (const auto& s : h1.steps())
      if (s.t > start) grid.push_back(s.t);
    for (const auto& s : h2.steps())
      if (s.t > start) grid.push_back(s.t);
    std::sort(grid.begin(), grid.end());
    Real acc = 0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      if (grid[k + 1] <= grid[k]) continue;
      acc += h1.integral(grid[k], grid[k + 1]) - h2.integral(grid[k], grid[k + 1]);
      worst = std::max(worst, acc);
    }
  }
  return worst;
}

inline void require_stable(const Network& net) {
  const auto report = stability_report(net);
  if (!report.stable)
    throw UnstableNetwork("mean service does not exceed effective demand at every queue");
}

}  // namespace detail

/// One application of the one-period state map: simulate a period from a
/// phase-0 state and re-anchor the result at phase 0.
inline NetworkState poincare_map(const Network& net, const NetworkState& state,
                                 const SimOptions& opts = {}) {
  detail::require_stable(net);
  return detail::advance_one_period(net, state, opts);
}

/// State after `periods` whole periods.
inline NetworkState advance_periods(const Network& net, NetworkState state, int periods,
                                    const SimOptions& opts = {}) {
  for (int k = 0; k < periods; ++k) state = detail::advance_one_period(net, state, opts);
  return state;
}

/// Iterates the one-period map from the zero state until consecutive iterates
/// are within `tol` in state distance.  Iterates from zero are ordered, and
/// that order is asserted every step.  Acyclic routing converges in finitely
/// many periods and is reported as ExactFiniteTime; otherwise the geometric
/// contraction rate is estimated from the distance tail.
inline PeriodicOrbit find_periodic_orbit(const Network& net, Real tol = 1e-9,
                                         int max_periods = 100000, const SimOptions& opts = {}) {
  detail::require_stable(net);
  const auto depth = routing_depth(net.routing());
  const Real stop = depth.acyclic ? std::min(tol, opts.tol) : tol;

  NetworkState state = zero_state(net);
  std::vector<Real> distances;
  int converged_at = -1;
  for (int n = 1; n <= max_periods; ++n) {
    NetworkState next = detail::advance_one_period(net, state, opts);
    for (std::size_t i = 0; i < state.queue.size(); ++i) {
      if (next.queue[i] < state.queue[i] - opts.tol)
        throw MonotonicityViolated("iterate queue vector decreased");
    }
    if (detail::history_order_violation(state, next) > opts.tol)
      throw MonotonicityViolated("iterate cumulative departures decreased");

    distances.push_back(state_distance(state, next));
    state = std::move(next);
    if (distances.back() <= stop) {
      converged_at = n;
      break;
    }
  }
  if (converged_at < 0)
    throw MaxPeriodsExceeded("orbit iteration did not converge within max_periods");

  Trajectory cycle = simulate(net, state, net.period(), opts);
  PeriodicOrbit orbit{std::move(state), std::move(cycle), converged_at, {}, std::move(distances)};
  if (depth.acyclic) {
    orbit.convergence.type = ConvergenceType::ExactFiniteTime;
    orbit.convergence.settled_after = converged_at - 1;
  } else {
    orbit.convergence.type = ConvergenceType::GeometricToTolerance;
    orbit.convergence.settled_after = converged_at;
    const auto& d = orbit.iterate_distances;
    std::vector<Real> ratios;
    for (std::size_t k = d.size() >= 6 ? d.size() - 5 : 1; k < d.size(); ++k) {
      if (d[k - 1] > 0) ratios.push_back(d[k] / d[k - 1]);
    }
    if (!ratios.empty()) {
      std::sort(ratios.begin(), ratios.end());
      orbit.convergence.contraction_rate = ratios[ratios.size() / 2];
    }
  }
  return orbit;
}

struct CouplingResult {
  bool coupled = false;
  Real time = 0;    // first event time after which the states stay together
  int periods = 0;  // whole periods elapsed when coupling is reached
};

/// Simulates both states in lockstep, period by period, evaluating the state
/// distance at every event time of either run.  Returns the first event time
/// from which the distance stays within opts.tol for at least a full period;
/// `coupled` is false when max_periods pass without that happening.
inline CouplingResult coupling_time(const Network& net, const NetworkState& a,
                                    const NetworkState& b, int max_periods = 1000,
                                    const SimOptions& opts = {}) {
  detail::require_stable(net);
  const Real T = net.period();
  NetworkState sa = a;
  NetworkState sb = b;
  std::optional<Real> candidate;

  for (int p = 0; p < max_periods; ++p) {
    const Trajectory ta = simulate(net, sa, T, opts);
    const Trajectory tb = simulate(net, sb, T, opts);
    std::vector<Real> grid = ta.times();
    grid.insert(grid.end(), tb.times().begin(), tb.times().end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](Real u, Real v) { return std::abs(u - v) <= 1e-12; }),
               grid.end());
    for (Real t : grid) {
      if (p > 0 && t == 0.0) continue;  // period boundary already checked
      const Real d = state_distance(ta.state_at(t), tb.state_at(t));
      const Real abs_t = p * T + t;
      if (d <= opts.tol) {
        if (!candidate) candidate = abs_t;
      } else {
        candidate.reset();
      }
    }
    const Real end = (p + 1) * T;
    if (candidate && end - *candidate >= T - 1e-12) {
      const Real t_star = *candidate;
      const int periods = static_cast<int>(std::ceil(t_star / T - 1e-12));
      return {true, t_star, periods};
    }
    sa = ta.final_state();
    sb = tb.final_state();
  }
  return {false, 0, max_periods};
}

/// Per-queue orbit checks: clearing within the period, measured unused
/// service against the mean-rate prediction, and the fixed-point residual.
struct OrbitCertificate {
  struct QueueCheck {
    bool cleared = false;
    Real clearing_time = 0;
    Real measured_unused = 0;
    Real predicted_unused = 0;
  };
  std::vector<QueueCheck> queues;
  Real poincare_residual = 0;
  bool passes = false;
};

inline OrbitCertificate verify_orbit(const Network& net, const PeriodicOrbit& orbit,
                                     Real unused_tol = 1e-8, Real residual_tol = 1e-9,
                                     Real clear_tol = kTol) {
  OrbitCertificate cert;
  const auto report = stability_report(net);
  const Real T = net.period();
  cert.poincare_residual = state_distance(orbit.cycle.final_state(), orbit.anchor);
  cert.passes = cert.poincare_residual <= residual_tol;
  for (int i = 0; i < net.queue_count(); ++i) {
    OrbitCertificate::QueueCheck check;
    for (std::size_t k = 0; k < orbit.cycle.times().size(); ++k) {
      if (orbit.cycle.x_event(i, k) <= clear_tol) {
        check.cleared = true;
        check.clearing_time = orbit.cycle.times()[k];
        break;
      }
    }
    check.measured_unused = orbit.cycle.v_event(i, orbit.cycle.times().size() - 1) -
                            orbit.cycle.v_event(i, 0);
    check.predicted_unused = T * report.predicted_wasted_service[static_cast<std::size_t>(i)];
    cert.passes = cert.passes && check.cleared &&
                  std::abs(check.measured_unused - check.predicted_unused) <= unused_tol;
    cert.queues.push_back(check);
  }
  return cert;
}

}  // namespace ftsim
