#pragma once

#include <thread>
#include <vector>

#include "ftsim/common.hpp"
#include "ftsim/metrics.hpp"
#include "ftsim/network.hpp"
#include "ftsim/orbit.hpp"
#include "ftsim/parallel.hpp"

namespace ftsim {

struct OffsetSweepPoint {
  Real offset = 0;
  Real delay = 0;
};

/// Sweeps the offset of one queue's service profile over a uniform grid of
/// the cycle, recomputing the periodic orbit and the per-vehicle delay at
/// that queue for each offset.  Runs fan out across a worker pool.
inline std::vector<OffsetSweepPoint> sweep_offset(const Network& net, int queue, int resolution,
                                                  int threads = 0, const SimOptions& opts = {}) {
  if (queue < 0 || queue >= net.queue_count()) throw DomainError("queue index out of range");
  if (net.links_into(queue).empty())
    throw DomainError("sweep requires a downstream queue fed by an upstream intersection");
  if (resolution < 1) throw DomainError("resolution must be positive");
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;

  const RateProfile base = net.service(queue);
  std::vector<OffsetSweepPoint> out(static_cast<std::size_t>(resolution));
  detail::parallel_for(resolution, threads, [&](int k) {
    const Real offset = net.period() * k / resolution;
    const Network shifted = net.with_service(queue, base.shifted(offset));
    const auto orbit = find_periodic_orbit(shifted, 1e-9, 100000, opts);
    Real delay = 0;
    try {
      delay = delay_per_vehicle(orbit.cycle, queue, 0.0, net.period());
    } catch (const NoThroughput&) {
      delay = 0;  // no vehicles on the orbit, nothing is delayed
    }
    out[static_cast<std::size_t>(k)] = {offset, delay};
  });
  return out;
}

}  // namespace ftsim
