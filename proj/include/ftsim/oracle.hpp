#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ftsim/common.hpp"
#include "ftsim/network.hpp"
#include "ftsim/parallel.hpp"
#include "ftsim/simulator.hpp"
#include "ftsim/state.hpp"
#include "ftsim/trajectory.hpp"

namespace ftsim {

/// Discrete-vehicle microsimulation parameters: `granularity` vehicles per
/// unit of fluid, fixed step `step`.  All rules are deterministic.
struct DiscreteConfig {
  long granularity = 1000;
  Real step = 1e-3;
};

/// Integer-vehicle trajectory on the step grid.  counts[i][k] is the vehicle
/// count of queue i at time k * step.
struct DiscreteTrajectory {
  Real step = 0;
  long granularity = 1;
  std::vector<std::vector<long>> counts;
  long entered = 0;  // initial content plus external arrivals
  long exited = 0;   // vehicles that left the network

  [[nodiscard]] std::size_t step_count() const { return counts.empty() ? 0 : counts[0].size(); }
  [[nodiscard]] Real normalized(int i, std::size_t k) const {
    return static_cast<Real>(counts[static_cast<std::size_t>(i)][k]) /
           static_cast<Real>(granularity);
  }
};

/// Deterministic pre-limit model of the fluid network: fractional arrival and
/// service credits move whole vehicles, departures are split across links by
/// cumulative largest-deficit apportionment, and link delays are rounded to
/// whole steps.  Integer conservation is exact at every step.
inline DiscreteTrajectory discrete_simulate(const Network& net, const DiscreteConfig& config,
                                            const NetworkState& init, Real horizon) {
  if (config.granularity < 1) throw NonfiniteInput("granularity must be at least 1");
  if (!(config.step > 0) || !is_finite(horizon) || horizon <= 0)
    throw NonfiniteInput("step and horizon must be positive");
  validate_state(net, init);

  const int n = net.queue_count();
  const Real h = config.step;
  const Real N = static_cast<Real>(config.granularity);
  const int steps = static_cast<int>(std::llround(horizon / h));
  const auto sz = [](int i) { return static_cast<std::size_t>(i); };

  DiscreteTrajectory out;
  out.step = h;
  out.granularity = config.granularity;
  out.counts.assign(sz(n), {});

  std::vector<long> queue(sz(n), 0);
  for (int i = 0; i < n; ++i) queue[sz(i)] = std::lround(init.queue[sz(i)] * N);

  // Scheduled link arrivals by landing step, plus an in-transit counter.
  std::vector<std::vector<long>> landing(sz(n), std::vector<long>(sz(steps) + 1, 0));
  long in_transit = 0;

  const auto links = net.links();
  std::vector<int> lag(links.size());
  std::vector<Real> route_quota(links.size() + sz(n), 0.0);  // per-link, then exit per queue
  std::vector<long> route_sent(links.size() + sz(n), 0);

  for (std::size_t l = 0; l < links.size(); ++l) {
    lag[l] = std::max<int>(1, static_cast<int>(std::llround(links[l].delay / h)));
  }

  // Vehicles already in flight at time 0, read from the initial history.
  for (std::size_t l = 0; l < links.size(); ++l) {
    const auto& link = links[l];
    if (init.departures[sz(link.from)].empty()) continue;
    Real credit = 0;
    long preloaded = 0;
    for (int k = 0; k < lag[l] && k <= steps; ++k) {
      // Fluid departing in [k*h - delay, (k+1)*h - delay) lands in step k.
      const Real s0 = k * h - links[l].delay;
      const Real s1 = std::min((k + 1) * h - links[l].delay, 0.0);
      if (s1 <= s0) continue;
      credit += link.ratio * N * init.departures[sz(link.from)].integral(s0, s1);
      const long move = static_cast<long>(std::floor(credit + 1e-9));
      if (move > 0) {
        landing[sz(link.to)][static_cast<std::size_t>(k)] += move;
        credit -= static_cast<Real>(move);
        preloaded += move;
      }
    }
    in_transit += preloaded;
  }

  long entered = in_transit;
  for (int i = 0; i < n; ++i) entered += queue[sz(i)];
  long exited = 0;

  std::vector<Real> entry_credit(sz(n), 0.0);
  std::vector<Real> service_credit(sz(n), 0.0);

  for (int k = 0; k <= steps; ++k) {
    for (int i = 0; i < n; ++i) out.counts[sz(i)].push_back(queue[sz(i)]);
    if (k == steps) break;
    const Real t0 = k * h;
    const Real t1 = (k + 1) * h;

    // Land scheduled link arrivals, then external arrivals.
    for (int i = 0; i < n; ++i) {
      const long landed = landing[sz(i)][static_cast<std::size_t>(k)];
      queue[sz(i)] += landed;
      in_transit -= landed;

      entry_credit[sz(i)] += N * net.entry(i).integral(t0, t1);
      const long fresh = static_cast<long>(std::floor(entry_credit[sz(i)] + 1e-9));
      if (fresh > 0) {
        entry_credit[sz(i)] = std::max(0.0, entry_credit[sz(i)] - static_cast<Real>(fresh));
        queue[sz(i)] += fresh;
        entered += fresh;
      }
    }

    // Serve and route.
    for (int i = 0; i < n; ++i) {
      service_credit[sz(i)] += N * net.service(i).integral(t0, t1);
      long available = static_cast<long>(std::floor(service_credit[sz(i)] + 1e-9));
      const long served = std::min(queue[sz(i)], available);
      queue[sz(i)] -= served;
      service_credit[sz(i)] = std::max(0.0, service_credit[sz(i)] - static_cast<Real>(served));
      if (queue[sz(i)] == 0) {
        // Unused whole-vehicle service is lost; the fractional part carries.
        service_credit[sz(i)] -= std::floor(service_credit[sz(i)]);
      }
      if (served == 0) continue;

      // Cumulative largest-deficit apportionment over out-links and the exit.
      const auto& out_links = net.links_out_of(i);
      const std::size_t exit_bucket = links.size() + sz(i);
      Real exit_ratio = 1.0;
      for (int l : out_links) {
        route_quota[static_cast<std::size_t>(l)] +=
            static_cast<Real>(served) * links[static_cast<std::size_t>(l)].ratio;
        exit_ratio -= links[static_cast<std::size_t>(l)].ratio;
      }
      route_quota[exit_bucket] += static_cast<Real>(served) * std::max(0.0, exit_ratio);

      for (long veh = 0; veh < served; ++veh) {
        std::size_t best = exit_bucket;
        Real best_deficit = route_quota[exit_bucket] - static_cast<Real>(route_sent[exit_bucket]);
        for (int l : out_links) {
          const auto bl = static_cast<std::size_t>(l);
          const Real deficit = route_quota[bl] - static_cast<Real>(route_sent[bl]);
          if (deficit > best_deficit + 1e-12) {
            best = bl;
            best_deficit = deficit;
          }
        }
        route_sent[best] += 1;
        if (best == exit_bucket) {
          exited += 1;
        } else {
          const auto& link = links[best];
          const std::size_t land_step = static_cast<std::size_t>(k) + sz(lag[best]);
          if (land_step <= static_cast<std::size_t>(steps)) {
            landing[sz(link.to)][land_step] += 1;
            in_transit += 1;
          } else {
            exited += 1;  // lands beyond the horizon; counts as departed
          }
        }
      }
    }

    // Integer conservation, exact at every step.
    long in_queues = 0;
    for (int i = 0; i < n; ++i) in_queues += queue[sz(i)];
    if (in_queues + in_transit + exited != entered)
      throw Error("discrete vehicle conservation broke");
  }

  out.entered = entered;
  out.exited = exited;
  return out;
}

/// Sup-norm gap between the fluid trajectory and the normalized discrete
/// counts for one granularity.
inline Real discrete_fluid_error(const Trajectory& fluid, const DiscreteTrajectory& discrete) {
  Real worst = 0;
  for (std::size_t k = 0; k < discrete.step_count(); ++k) {
    const Real t = static_cast<Real>(k) * discrete.step;
    if (t > fluid.end_time() + kTol) break;
    for (int i = 0; i < fluid.queue_count(); ++i)
      worst = std::max(worst,
                       std::abs(discrete.normalized(i, k) - fluid.x_at(i, std::min(t, fluid.end_time()))));
  }
  return worst;
}

struct FluidDiscreteComparison {
  std::vector<long> granularities;
  std::vector<Real> sup_errors;
};

/// Runs the discrete model at each granularity and reports the sup-norm error
/// against the event-exact fluid trajectory.
inline FluidDiscreteComparison compare_fluid_discrete(const Network& net,
                                                      const NetworkState& init, Real horizon,
                                                      const std::vector<long>& granularities,
                                                      Real step = 1e-3, int threads = 1) {
  const Trajectory fluid = simulate(net, init, horizon);
  FluidDiscreteComparison out;
  out.granularities = granularities;
  out.sup_errors.assign(granularities.size(), 0.0);
  detail::parallel_for(static_cast<int>(granularities.size()), threads, [&](int k) {
    const DiscreteConfig config{granularities[static_cast<std::size_t>(k)], step};
    const auto discrete = discrete_simulate(net, config, init, horizon);
    out.sup_errors[static_cast<std::size_t>(k)] = discrete_fluid_error(fluid, discrete);
  });
  return out;
}

}  // namespace ftsim
