#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ftsim/common.hpp"
#include "ftsim/network.hpp"
#include "ftsim/step_function.hpp"

namespace ftsim {

/// Instantaneous state of a network anchored at phase 0 of the cycle: queue
/// levels plus the trailing departure-rate history over [-max_delay, 0].
struct NetworkState {
  std::vector<Real> queue;
  std::vector<StepFunction> departures;
};

inline NetworkState zero_state(const Network& net) {
  NetworkState s;
  s.queue.assign(static_cast<std::size_t>(net.queue_count()), 0.0);
  s.departures.assign(static_cast<std::size_t>(net.queue_count()),
                      StepFunction::constant(-net.max_delay(), 0.0));
  return s;
}

/// Checks shape, finiteness, x >= 0, history coverage of [-max_delay, 0] and
/// 0 <= b <= c on the window.  Throws on violation.
inline void validate_state(const Network& net, const NetworkState& state, Real tol = kTol) {
  const int n = net.queue_count();
  if (static_cast<int>(state.queue.size()) != n ||
      static_cast<int>(state.departures.size()) != n)
    throw ShapeMismatch("state size does not match network");
  for (int i = 0; i < n; ++i) {
    const Real x = state.queue[static_cast<std::size_t>(i)];
    if (!is_finite(x)) throw NonfiniteInput("queue length is not finite");
    if (x < -tol) throw NegativeInitialCondition("queue length below zero");
    const auto& h = state.departures[static_cast<std::size_t>(i)];
    if (net.max_delay() > 0) {
      if (h.empty() || h.domain_start() > -net.max_delay() + tol)
        throw HistoryGap("departure history does not cover [-max_delay, 0]");
      for (std::size_t k = 0; k < h.steps().size(); ++k) {
        const auto& step = h.steps()[k];
        if (!is_finite(step.value) || step.value < -tol)
          throw NonfiniteInput("departure history rate invalid");
        // b <= c must hold pointwise, so compare against the service minimum
        // over the step's span (the profile may break inside it).
        const Real span_end = (k + 1 < h.steps().size()) ? h.steps()[k + 1].t : 0.0;
        Real c_min = net.service(i).value_at(step.t);
        for (Real s = net.service(i).next_breakpoint_after(step.t); s < span_end;
             s = net.service(i).next_breakpoint_after(s)) {
          c_min = std::min(c_min, net.service(i).value_at(s));
        }
        if (step.value > c_min + tol)
          throw NonfiniteInput("departure history exceeds service rate");
      }
    }
  }
}

/// Instantaneous arrival rate a(i)(t) = e(i)(t) + sum_j r(j,i) b(j)(t - tau(j,i)),
/// with departures given as absolute-time step functions.
inline Real arrival_rate(const Network& net, const std::vector<StepFunction>& departures, int i,
                         Real t) {
  Real a = net.entry(i).value_at(t);
  for (int k : net.links_into(i)) {
    const auto& link = net.links()[static_cast<std::size_t>(k)];
    a += link.ratio * departures[static_cast<std::size_t>(link.from)].value_at(t - link.delay);
  }
  return a;
}

/// Arrival rate at the anchor instant of a state.
inline Real arrival_rate(const Network& net, const NetworkState& state, int i) {
  return arrival_rate(net, state.departures, i, 0.0);
}

/// Vehicles in queues plus fluid in transit that will arrive at some queue:
/// sum_i x(i) + sum_links ratio * integral of the upstream departures over the
/// trailing delay window.
inline Real total_vehicles(const Network& net, const NetworkState& state) {
  Real total = 0;
  for (Real x : state.queue) total += x;
  for (const auto& link : net.links()) {
    total += link.ratio * state.departures[static_cast<std::size_t>(link.from)].integral(
                              -link.delay, 0.0);
  }
  return total;
}

/// Distance between two states at the same phase: the max queue-length gap
/// plus the max over queues of the sup over the trailing window of the gap in
/// cumulative departures (aligned at the window start).
inline Real state_distance(const NetworkState& s1, const NetworkState& s2) {
  if (s1.queue.size() != s2.queue.size()) throw ShapeMismatch("states of different networks");
  Real dx = 0;
  for (std::size_t i = 0; i < s1.queue.size(); ++i)
    dx = std::max(dx, std::abs(s1.queue[i] - s2.queue[i]));

  Real dh = 0;
  for (std::size_t i = 0; i < s1.departures.size(); ++i) {
    const auto& h1 = s1.departures[i];
    const auto& h2 = s2.departures[i];
    if (h1.empty() && h2.empty()) continue;
    if (h1.empty() != h2.empty()) throw ShapeMismatch("states with different history shapes");
    const Real lo = std::max(h1.domain_start(), h2.domain_start());
    std::vector<Real> grid{lo};
    for (const auto& s : h1.steps())
      if (s.t > lo) grid.push_back(s.t);
    for (const auto& s : h2.steps())
      if (s.t > lo) grid.push_back(s.t);
    grid.push_back(0.0);
    std::sort(grid.begin(), grid.end());
    Real acc = 0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      if (grid[k + 1] <= grid[k]) continue;
      acc += h1.integral(grid[k], grid[k + 1]) - h2.integral(grid[k], grid[k + 1]);
      dh = std::max(dh, std::abs(acc));
    }
  }
  return dx + dh;
}

}  // namespace ftsim
