#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "ftsim/common.hpp"
#include "ftsim/network.hpp"
#include "ftsim/state.hpp"
#include "ftsim/step_function.hpp"
#include "ftsim/trajectory.hpp"

namespace ftsim {

struct SimOptions {
  /// Model comparison tolerance (queue positivity, state coincidence).
  Real tol = kTol;
  /// Abort threshold for events within a single period.
  std::size_t max_events_per_period = 1'000'000;
};

namespace detail {

/// Width of the window in which two event times count as simultaneous.  This
/// is a roundoff-scale merge, far below the model tolerance, so genuinely
/// distinct events (which may be ~1e-9 apart in slowly-coupling networks)
/// are never fused.
inline Real merge_width(Real t) { return 1e-12 * std::max<Real>(1.0, std::abs(t)); }

}  // namespace detail

/// Event-exact integration of the network dynamics on [0, horizon].
///
/// Between events every arrival and departure rate is constant and every
/// queue is linear.  Events are service/entry profile breakpoints, delayed
/// upstream rate changes reaching a link end, queue-empty instants (computed
/// in closed form), and the horizon.  Simultaneous events are applied as one
/// batch before rates are recomputed.
///
/// Per-queue rate rule at each instant: b = c when x > 0; b = min(a, c) when
/// x = 0, with unused service y = c - b.
inline Trajectory simulate(const Network& net, const NetworkState& init, Real horizon,
                           const SimOptions& opts = {}) {
  if (!is_finite(horizon) || horizon <= 0) throw NonfiniteInput("horizon must be positive");
  validate_state(net, init, opts.tol);

  const int n = net.queue_count();
  const auto sz = [](int i) { return static_cast<std::size_t>(i); };

  std::vector<Real> x(init.queue);
  for (Real& q : x) q = std::max(q, 0.0);
  std::vector<Real> a(sz(n), 0.0), b(sz(n), 0.0), y(sz(n), 0.0), v(sz(n), 0.0);
  std::vector<StepFunction> hist(init.departures);

  std::priority_queue<Real, std::vector<Real>, std::greater<>> wakeups;
  auto push_wakeup = [&wakeups, horizon](Real t) {
    if (t > 0 && t < horizon) wakeups.push(t);
  };
  // Arrival-rate changes induced by the initial history.
  for (const auto& link : net.links()) {
    for (const auto& step : hist[sz(link.from)].steps()) push_wakeup(step.t + link.delay);
  }

  Trajectory traj(net, init);
  Real t = 0.0;
  std::vector<char> emptied(sz(n), 0);
  long period_bucket = -1;
  std::size_t events_in_period = 0;

  while (true) {
    // Rates at t (right-continuous).  Delayed lookups read strictly earlier
    // history, so the order of queues does not matter.
    for (int i = 0; i < n; ++i) {
      Real ai = net.entry(i).value_at(t);
      for (int k : net.links_into(i)) {
        const auto& link = net.links()[sz(k)];
        ai += link.ratio * hist[sz(link.from)].value_at(t - link.delay);
      }
      if (!is_finite(ai)) throw NonfiniteInput("arrival rate is not finite");
      a[sz(i)] = ai;
      const Real c = net.service(i).value_at(t);
      b[sz(i)] = (x[sz(i)] > 0) ? c : std::min(ai, c);
      y[sz(i)] = c - b[sz(i)];
    }

    // Record departure-rate changes and schedule their delayed effects.
    for (int i = 0; i < n; ++i) {
      if (hist[sz(i)].empty() || hist[sz(i)].last_value() != b[sz(i)]) {
        hist[sz(i)].append(t, b[sz(i)], detail::merge_width(t));
        for (int k : net.links_out_of(i)) push_wakeup(t + net.links()[sz(k)].delay);
      }
    }

    traj.append_event(t, x, a, b, y, v);
    if (t >= horizon - detail::merge_width(horizon)) break;

    // Chattering guard, counted per period of the common cycle.
    const long bucket = static_cast<long>(std::floor(t / net.period()));
    if (bucket != period_bucket) {
      period_bucket = bucket;
      events_in_period = 0;
    }
    if (++events_in_period > opts.max_events_per_period)
      throw ChatteringSuspected("event count within one period exceeded the guard");

    // Earliest next event.
    Real tn = horizon;
    for (int i = 0; i < n; ++i) {
      tn = std::min(tn, net.entry(i).next_breakpoint_after(t));
      tn = std::min(tn, net.service(i).next_breakpoint_after(t));
    }
    while (!wakeups.empty() && wakeups.top() <= t + detail::merge_width(t)) wakeups.pop();
    if (!wakeups.empty()) tn = std::min(tn, wakeups.top());
    std::fill(emptied.begin(), emptied.end(), 0);
    for (int i = 0; i < n; ++i) {
      const Real net_rate = a[sz(i)] - b[sz(i)];
      if (x[sz(i)] > 0 && net_rate < 0) {
        const Real te = t + x[sz(i)] / (-net_rate);
        if (te < tn - detail::merge_width(te)) tn = te;
      }
    }
    if (tn <= t) throw ChatteringSuspected("event time failed to advance");

    // Advance linearly and mark queues that drain to zero exactly at tn.
    const Real dt = tn - t;
    for (int i = 0; i < n; ++i) {
      const Real net_rate = a[sz(i)] - b[sz(i)];
      if (x[sz(i)] > 0 && net_rate < 0) {
        const Real te = t + x[sz(i)] / (-net_rate);
        if (te <= tn + detail::merge_width(tn)) emptied[sz(i)] = 1;
      }
      x[sz(i)] += dt * net_rate;
      v[sz(i)] += dt * y[sz(i)];
      if (emptied[sz(i)] || x[sz(i)] < 0) x[sz(i)] = std::max(0.0, x[sz(i)]);
      if (emptied[sz(i)]) x[sz(i)] = 0.0;
    }
    while (!wakeups.empty() && wakeups.top() <= tn + detail::merge_width(tn)) wakeups.pop();
    t = tn;
  }
  return traj;
}

/// One-call convenience: simulate from the zero state.
inline Trajectory simulate(const Network& net, Real horizon, const SimOptions& opts = {}) {
  return simulate(net, zero_state(net), horizon, opts);
}

}  // namespace ftsim
