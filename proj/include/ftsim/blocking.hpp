#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "ftsim/common.hpp"
#include "ftsim/network.hpp"
#include "ftsim/simulator.hpp"
#include "ftsim/state.hpp"
#include "ftsim/trajectory.hpp"

namespace ftsim {

/// Per-queue storage capacities; +inf disables blocking for a queue.
struct StorageLimits {
  std::vector<Real> capacity;

  static StorageLimits unlimited(int n) {
    return {std::vector<Real>(static_cast<std::size_t>(n), kInf)};
  }
  [[nodiscard]] Real of(int i) const { return capacity[static_cast<std::size_t>(i)]; }
  [[nodiscard]] bool any_finite() const {
    for (Real c : capacity)
      if (is_finite(c)) return true;
    return false;
  }
};

struct BlockingMode {
  enum class Kind { RateCapped, StrictGateDiscrete };
  Kind kind = Kind::RateCapped;
  Real grid_step = 1e-2;  // StrictGateDiscrete gate-review spacing

  static BlockingMode rate_capped() { return {Kind::RateCapped, 0}; }
  static BlockingMode strict_gate(Real h) { return {Kind::StrictGateDiscrete, h}; }
};

struct BlockingResult {
  Trajectory trajectory;
  /// Fluid that arrived at a full queue and could not be accommodated.
  std::vector<Real> spilled;
};

namespace detail {

/// Solves the feeder throttle factors for the currently full queues: for each
/// full queue j, a common factor alpha_j in [0, 1] scales the service of every
/// queue feeding j so that the inflow j would receive from those feeders
/// matches j's own outflow.  Queues feeding several full queues take the
/// smallest factor.  Full queues whose (delayed) arrivals already fall short
/// of their outflow are draining, so their gate releases entirely.
struct GateSolver {
  const Network& net;
  const StorageLimits& limits;
  Real tol;

  std::vector<char> full;
  std::vector<Real> alpha;

  GateSolver(const Network& n, const StorageLimits& l, Real t)
      : net(n), limits(l), tol(t),
        full(static_cast<std::size_t>(n.queue_count()), 0),
        alpha(static_cast<std::size_t>(n.queue_count()), 1.0) {}

  [[nodiscard]] Real gate_of(int i) const {
    Real g = 1.0;
    for (int k : net.links_out_of(i)) {
      const auto& link = net.links()[static_cast<std::size_t>(k)];
      if (link.ratio > 0 && full[static_cast<std::size_t>(link.to)])
        g = std::min(g, alpha[static_cast<std::size_t>(link.to)]);
    }
    return g;
  }

  void departures(const std::vector<Real>& x, const std::vector<Real>& a,
                  const std::vector<Real>& c, std::vector<Real>& b) const {
    const int n = net.queue_count();
    for (int i = 0; i < n; ++i) {
      const auto si = static_cast<std::size_t>(i);
      const Real eff = c[si] * gate_of(i);
      b[si] = (x[si] > 0) ? eff : std::min(a[si], eff);
    }
  }

  /// Inflow queue j would receive if current feeder departures arrived now.
  [[nodiscard]] Real instant_inflow(int j, Real t, const std::vector<Real>& b) const {
    Real inflow = net.entry(j).value_at(t);
    for (int k : net.links_into(j)) {
      const auto& link = net.links()[static_cast<std::size_t>(k)];
      inflow += link.ratio * b[static_cast<std::size_t>(link.from)];
    }
    return inflow;
  }

  void solve(Real t, const std::vector<Real>& x, const std::vector<Real>& a,
             const std::vector<Real>& c, std::vector<Real>& b) {
    const int n = net.queue_count();
    for (int i = 0; i < n; ++i) {
      const auto si = static_cast<std::size_t>(i);
      full[si] = is_finite(limits.of(i)) && x[si] >= limits.of(i) - tol;
      alpha[si] = 1.0;
    }
    departures(x, a, c, b);
    // First sweep solves each full queue's balance exactly; later sweeps may
    // only tighten.  Mutually-feeding full queues share min-gates, so exact
    // re-solves can flip which constraint binds and oscillate; the monotone
    // restriction keeps the iteration bounded and decreasing, at worst
    // throttling slightly harder than the exact balance for one instant.
    for (int sweep = 0; sweep < 200; ++sweep) {
      Real worst = 0;
      for (int j = 0; j < n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (!full[sj]) continue;
        const Real before = alpha[sj];
        const Real root = solve_one(j, t, x, a, c, b);
        alpha[sj] = (sweep == 0) ? root : std::min(before, root);
        worst = std::max(worst, std::abs(alpha[sj] - before));
        departures(x, a, c, b);
      }
      if (worst <= 1e-12) return;
    }
    throw ChatteringSuspected("blocking gate factors did not settle");
  }

 private:
  /// Balance residual for queue j at trial factor v: inflow - outflow.
  Real residual(int j, Real v, Real t, const std::vector<Real>& x, const std::vector<Real>& a,
                const std::vector<Real>& c, std::vector<Real>& b) {
    const auto sj = static_cast<std::size_t>(j);
    const Real keep = alpha[sj];
    alpha[sj] = v;
    departures(x, a, c, b);
    const Real r = instant_inflow(j, t, b) - b[sj];
    alpha[sj] = keep;
    return r;
  }

  /// Largest factor in [0, 1] balancing queue j's matched inflow against its
  /// outflow.  A residual that is negative on all of [0, 1] means the feeders
  /// cannot keep the queue full even unthrottled: the gate releases (alpha 1)
  /// and the queue drains off its cap.  A residual positive everywhere means
  /// overflow even with closed gates: alpha 0, the excess spills.
  Real solve_one(int j, Real t, const std::vector<Real>& x, const std::vector<Real>& a,
                 const std::vector<Real>& c, std::vector<Real>& b) {
    constexpr int kScan = 16;
    Real prev_v = 1.0;
    Real prev_r = residual(j, 1.0, t, x, a, c, b);
    if (std::abs(prev_r) <= tol) return 1.0;
    bool all_negative = prev_r < 0;
    for (int k = 1; k <= kScan; ++k) {
      const Real v = 1.0 - static_cast<Real>(k) / kScan;
      const Real r = residual(j, v, t, x, a, c, b);
      if (std::abs(r) <= tol && v > 0) return v;
      if ((r <= 0) != (prev_r <= 0)) {
        // Bracketed sign change: bisect to the root.
        Real lo = v, hi = prev_v;
        Real lo_r = r;
        for (int it = 0; it < 60; ++it) {
          const Real mid = 0.5 * (lo + hi);
          const Real mr = residual(j, mid, t, x, a, c, b);
          if ((mr <= 0) == (lo_r <= 0)) {
            lo = mid;
            lo_r = mr;
          } else {
            hi = mid;
          }
        }
        return 0.5 * (lo + hi);
      }
      prev_v = v;
      prev_r = r;
      all_negative = all_negative && r < 0;
    }
    if (std::abs(prev_r) <= tol) return 0.0;  // root at the closed gate (gridlock)
    return all_negative ? 1.0 : 0.0;
  }
};

}  // namespace detail

/// Finite-storage simulation.  Service of a queue is gated when a downstream
/// queue is at capacity: RateCapped scales feeder service continuously so a
/// full queue's matched inflow equals its outflow; StrictGateDiscrete applies
/// the binary gate, re-evaluated on a fixed time grid.  Queue levels never
/// exceed their capacity; fluid landing on a full queue beyond its outflow is
/// recorded in `spilled`.
inline BlockingResult simulate_blocking(const Network& net, const StorageLimits& limits,
                                        const NetworkState& init, Real horizon,
                                        const BlockingMode& mode = BlockingMode::rate_capped(),
                                        const SimOptions& opts = {}) {
  if (!is_finite(horizon) || horizon <= 0) throw NonfiniteInput("horizon must be positive");
  validate_state(net, init, opts.tol);
  const int n = net.queue_count();
  if (static_cast<int>(limits.capacity.size()) != n)
    throw ShapeMismatch("storage limits size does not match network");
  for (int i = 0; i < n; ++i) {
    if (init.queue[static_cast<std::size_t>(i)] > limits.of(i) + opts.tol)
      throw CapacityExceededAtInit("initial queue above its storage capacity");
  }
  const bool strict = mode.kind == BlockingMode::Kind::StrictGateDiscrete;
  if (strict && !(mode.grid_step > 0)) throw NonfiniteInput("grid step must be positive");

  const auto sz = [](int i) { return static_cast<std::size_t>(i); };
  std::vector<Real> x(init.queue);
  for (Real& q : x) q = std::max(q, 0.0);
  std::vector<Real> a(sz(n), 0.0), b(sz(n), 0.0), y(sz(n), 0.0), v(sz(n), 0.0), c(sz(n), 0.0);
  std::vector<Real> spilled(sz(n), 0.0);
  std::vector<Real> spill_rate(sz(n), 0.0);
  std::vector<StepFunction> hist(init.departures);

  std::priority_queue<Real, std::vector<Real>, std::greater<>> wakeups;
  auto push_wakeup = [&wakeups, horizon](Real t) {
    if (t > 0 && t < horizon) wakeups.push(t);
  };
  for (const auto& link : net.links()) {
    for (const auto& step : hist[sz(link.from)].steps()) push_wakeup(step.t + link.delay);
  }

  detail::GateSolver gates(net, limits, opts.tol);
  std::vector<char> strict_gate(sz(n), 1);
  auto review_strict_gates = [&] {
    for (int i = 0; i < n; ++i) {
      bool open = true;
      for (int k : net.links_out_of(i)) {
        const auto& link = net.links()[sz(k)];
        if (link.ratio > 0 && is_finite(limits.of(link.to)) &&
            x[sz(link.to)] >= limits.of(link.to) - opts.tol)
          open = false;
      }
      strict_gate[sz(i)] = open ? 1 : 0;
    }
  };
  if (strict) review_strict_gates();

  Trajectory traj(net, init);
  Real t = 0.0;
  std::vector<char> emptied(sz(n), 0), capped(sz(n), 0);
  long period_bucket = -1;
  std::size_t events_in_period = 0;

  while (true) {
    for (int i = 0; i < n; ++i) {
      Real ai = net.entry(i).value_at(t);
      for (int k : net.links_into(i)) {
        const auto& link = net.links()[sz(k)];
        ai += link.ratio * hist[sz(link.from)].value_at(t - link.delay);
      }
      if (!is_finite(ai)) throw NonfiniteInput("arrival rate is not finite");
      a[sz(i)] = ai;
      c[sz(i)] = net.service(i).value_at(t);
    }

    if (strict) {
      // Binary gates frozen since the last grid review.
      for (int i = 0; i < n; ++i) {
        const Real eff = strict_gate[sz(i)] ? c[sz(i)] : 0.0;
        b[sz(i)] = (x[sz(i)] > 0) ? eff : std::min(a[sz(i)], eff);
        y[sz(i)] = eff - b[sz(i)];
      }
    } else if (limits.any_finite()) {
      gates.solve(t, x, a, c, b);
      for (int i = 0; i < n; ++i) y[sz(i)] = c[sz(i)] * gates.gate_of(i) - b[sz(i)];
    } else {
      for (int i = 0; i < n; ++i) {
        b[sz(i)] = (x[sz(i)] > 0) ? c[sz(i)] : std::min(a[sz(i)], c[sz(i)]);
        y[sz(i)] = c[sz(i)] - b[sz(i)];
      }
    }

    // A full queue only absorbs what it can pass on; the remainder spills.
    for (int i = 0; i < n; ++i) {
      spill_rate[sz(i)] = 0.0;
      if (is_finite(limits.of(i)) && x[sz(i)] >= limits.of(i) - opts.tol) {
        const Real net_rate = a[sz(i)] - b[sz(i)];
        if (net_rate > 0) spill_rate[sz(i)] = net_rate;
      }
    }

    for (int i = 0; i < n; ++i) {
      if (hist[sz(i)].empty() || hist[sz(i)].last_value() != b[sz(i)]) {
        hist[sz(i)].append(t, b[sz(i)], detail::merge_width(t));
        for (int k : net.links_out_of(i)) push_wakeup(t + net.links()[sz(k)].delay);
      }
    }

    traj.append_event(t, x, a, b, y, v);
    if (t >= horizon - detail::merge_width(horizon)) break;

    const long bucket = static_cast<long>(std::floor(t / net.period()));
    if (bucket != period_bucket) {
      period_bucket = bucket;
      events_in_period = 0;
    }
    if (++events_in_period > opts.max_events_per_period)
      throw ChatteringSuspected("event count within one period exceeded the guard");

    Real tn = horizon;
    for (int i = 0; i < n; ++i) {
      tn = std::min(tn, net.entry(i).next_breakpoint_after(t));
      tn = std::min(tn, net.service(i).next_breakpoint_after(t));
    }
    while (!wakeups.empty() && wakeups.top() <= t + detail::merge_width(t)) wakeups.pop();
    if (!wakeups.empty()) tn = std::min(tn, wakeups.top());
    if (strict) {
      const Real next_review = (std::floor(t / mode.grid_step + 1e-9) + 1.0) * mode.grid_step;
      tn = std::min(tn, next_review);
    }
    for (int i = 0; i < n; ++i) {
      const Real net_rate = a[sz(i)] - b[sz(i)] - spill_rate[sz(i)];
      if (x[sz(i)] > 0 && net_rate < 0) {
        const Real te = t + x[sz(i)] / (-net_rate);
        if (te < tn - detail::merge_width(te)) tn = te;
      }
      if (is_finite(limits.of(i)) && x[sz(i)] < limits.of(i) && net_rate > 0) {
        const Real tc = t + (limits.of(i) - x[sz(i)]) / net_rate;
        if (tc < tn - detail::merge_width(tc)) tn = tc;
      }
    }
    if (tn <= t) throw ChatteringSuspected("event time failed to advance");

    const Real dt = tn - t;
    std::fill(emptied.begin(), emptied.end(), 0);
    std::fill(capped.begin(), capped.end(), 0);
    for (int i = 0; i < n; ++i) {
      const Real net_rate = a[sz(i)] - b[sz(i)] - spill_rate[sz(i)];
      if (x[sz(i)] > 0 && net_rate < 0) {
        const Real te = t + x[sz(i)] / (-net_rate);
        if (te <= tn + detail::merge_width(tn)) emptied[sz(i)] = 1;
      }
      if (is_finite(limits.of(i)) && net_rate > 0) {
        const Real tc = t + (limits.of(i) - x[sz(i)]) / net_rate;
        if (tc <= tn + detail::merge_width(tn)) capped[sz(i)] = 1;
      }
      x[sz(i)] += dt * net_rate;
      v[sz(i)] += dt * y[sz(i)];
      spilled[sz(i)] += dt * spill_rate[sz(i)];
      if (emptied[sz(i)] || x[sz(i)] < 0) x[sz(i)] = 0.0;
      if (capped[sz(i)] || x[sz(i)] > limits.of(i)) x[sz(i)] = limits.of(i);
    }
    while (!wakeups.empty() && wakeups.top() <= tn + detail::merge_width(tn)) wakeups.pop();
    t = tn;

    if (strict) {
      // Gate review on the grid: a queue's service shuts iff some successor
      // sits at capacity right now.
      const Real phase = t / mode.grid_step;
      if (std::abs(phase - std::round(phase)) * mode.grid_step <= detail::merge_width(t))
        review_strict_gates();
    }
  }
  return {std::move(traj), std::move(spilled)};
}

struct GridlockReport {
  bool gridlocked = false;
  std::vector<int> queues;
};

/// A queue is gridlocked over [t0, t1] when it sits at a finite capacity with
/// zero departures throughout.
inline GridlockReport detect_gridlock(const Trajectory& traj, const StorageLimits& limits,
                                      Real t0, Real t1, Real tol = kTol) {
  GridlockReport report;
  for (int i = 0; i < traj.queue_count(); ++i) {
    const Real cap = limits.of(i);
    if (!is_finite(cap)) continue;
    bool stuck = std::abs(traj.x_at(i, t0) - cap) <= tol && traj.b_at(i, t0) <= tol;
    for (std::size_t k = 0; stuck && k < traj.times().size(); ++k) {
      const Real t = traj.times()[k];
      if (t < t0 || t > t1) continue;
      if (std::abs(traj.x_event(i, k) - cap) > tol || traj.b_event(i, k) > tol) stuck = false;
    }
    if (stuck) report.queues.push_back(i);
  }
  report.gridlocked = !report.queues.empty();
  return report;
}

}  // namespace ftsim
