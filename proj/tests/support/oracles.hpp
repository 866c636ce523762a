#pragma once

// Independent reference computations used as test oracles.  These stay
// deliberately naive: grids and running maxima instead of the closed-form
// event logic used by the library.

#include <algorithm>
#include <cmath>
#include <vector>

#include "ftsim/network.hpp"
#include "ftsim/piecewise_linear.hpp"
#include "ftsim/state.hpp"

namespace ftsim::testing {

/// Brute-force reflection compensator on a uniform grid:
/// v(t_k) = max_{j<=k} max(-u(t_j), 0).
inline std::vector<Real> grid_reflection_v(const PiecewiseLinearPath& u, int steps) {
  const Real t0 = u.start_time();
  const Real h = (u.end_time() - t0) / steps;
  std::vector<Real> v(static_cast<std::size_t>(steps) + 1);
  Real running = 0.0;
  for (int k = 0; k <= steps; ++k) {
    running = std::max(running, -u.value_at(t0 + k * h));
    v[static_cast<std::size_t>(k)] = running;
  }
  return v;
}

/// Fixed-step explicit integration of the network equations.  Delayed
/// departure rates are read from a per-queue grid history; the boundary rule
/// b = min(a, c) applies whenever the queue is (numerically) empty.
struct GridTrajectory {
  Real step = 0;
  std::vector<std::vector<Real>> x;  // [queue][step]
  std::vector<std::vector<Real>> b;
};

inline GridTrajectory euler_simulate(const Network& net, const NetworkState& init, Real horizon,
                                     Real h) {
  const int n = net.queue_count();
  const int steps = static_cast<int>(std::llround(horizon / h));
  const int lag_max = static_cast<int>(std::llround(net.max_delay() / h)) + 1;

  GridTrajectory out;
  out.step = h;
  out.x.assign(n, {});
  out.b.assign(n, {});

  std::vector<std::vector<Real>> hist(n, std::vector<Real>(static_cast<std::size_t>(lag_max), 0.0));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < lag_max; ++k) {
      const Real s = -net.max_delay() + k * h;
      hist[i][static_cast<std::size_t>(k)] =
          init.departures[i].empty() ? 0.0 : init.departures[i].value_at(std::min(s, 0.0));
    }
  }

  std::vector<Real> x(init.queue);
  for (int k = 0; k <= steps; ++k) {
    const Real t = k * h;
    std::vector<Real> a(n, 0.0), b(n, 0.0);
    for (int i = 0; i < n; ++i) a[i] = net.entry(i).value_at(t);
    for (const auto& link : net.links()) {
      const int lag = static_cast<int>(std::llround(link.delay / h));
      Real rate;
      if (k - lag >= 0) {
        rate = out.b[link.from][static_cast<std::size_t>(k - lag)];
      } else {
        const int idx = lag_max - 1 + (k - lag);
        rate = hist[link.from][static_cast<std::size_t>(std::max(0, idx))];
      }
      a[link.to] += link.ratio * rate;
    }
    for (int i = 0; i < n; ++i) {
      const Real c = net.service(i).value_at(t);
      b[i] = (x[i] > 1e-12) ? c : std::min(a[i], c);
      out.x[i].push_back(x[i]);
      out.b[i].push_back(b[i]);
    }
    for (int i = 0; i < n; ++i) x[i] = std::max(0.0, x[i] + h * (a[i] - b[i]));
  }
  return out;
}

}  // namespace ftsim::testing
