#pragma once

// Canonical desk networks used across the test suites.

#include "ftsim/network.hpp"

namespace ftsim::testing {

/// Single intersection: constant unit arrivals, service 3 during the first
/// half of the unit cycle, no routing.
inline Network example1() {
  return Network(1.0, {RateProfile::constant(1.0, 1.0)},
                 {RateProfile(1.0, {{0.0, 3.0}, {0.5, 0.0}})}, {});
}

/// Recirculating queue: no external arrivals, service 1 during the first half
/// of the unit cycle, half of all departures return after half a cycle.
inline Network example2() {
  return Network(1.0, {RateProfile::constant(1.0, 0.0)},
                 {RateProfile(1.0, {{0.0, 1.0}, {0.5, 0.0}})}, {{0, 0, 0.5, 0.5}});
}

/// Two intersections in tandem: the single intersection feeds a second queue
/// (ratio 1, travel time `delay`) whose green window of length 1/2 at rate 3
/// starts at `offset`.
inline Network tandem(Real offset, Real delay = 0.5) {
  const RateProfile c2 = RateProfile(1.0, {{0.0, 3.0}, {0.5, 0.0}}).shifted(offset);
  return Network(1.0,
                 {RateProfile::constant(1.0, 1.0), RateProfile::constant(1.0, 0.0)},
                 {RateProfile(1.0, {{0.0, 3.0}, {0.5, 0.0}}), c2},
                 {{0, 1, 1.0, delay}});
}

}  // namespace ftsim::testing
