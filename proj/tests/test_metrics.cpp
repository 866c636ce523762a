#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "ftsim/metrics.hpp"
#include "ftsim/orbit.hpp"
#include "ftsim/simulator.hpp"
#include "ftsim/sweep.hpp"
#include "support/networks.hpp"

using namespace ftsim;

TEST_CASE("average queue of the single-intersection orbit is 3/16") {
  const auto orbit = find_periodic_orbit(testing::example1());
  CHECK(average_queue(orbit.cycle, 0, 0.0, 1.0) == Catch::Approx(3.0 / 16.0).margin(1e-9));
}

TEST_CASE("average queue of an empty queue is zero") {
  Network idle(1.0, {RateProfile::constant(1.0, 0.0)}, {RateProfile::constant(1.0, 1.0)}, {});
  const auto traj = simulate(idle, 1.0);
  CHECK(average_queue(traj, 0, 0.0, 1.0) == 0.0);
}

TEST_CASE("average queue of a unit triangle is one half") {
  // Queue fills at rate 2 for half a cycle, then drains at rate 2.
  Network tri(1.0, {RateProfile(1.0, {{0.0, 2.0}, {0.5, 0.0}})},
              {RateProfile(1.0, {{0.0, 0.0}, {0.5, 2.0}})}, {});
  const auto traj = simulate(tri, 1.0);
  CHECK(traj.x_at(0, 0.5) == Catch::Approx(1.0).margin(1e-12));
  CHECK(average_queue(traj, 0, 0.0, 1.0) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("average queue is additive and phase-invariant on the orbit") {
  const auto net = testing::example1();
  const auto orbit = find_periodic_orbit(net);
  const auto two = simulate(net, orbit.anchor, 2.0);
  const Real avg = average_queue(two, 0, 0.0, 1.0);
  for (Real s : {0.1, 0.25, 0.6, 0.99}) {
    CHECK(average_queue(two, 0, s, s + 1.0) == Catch::Approx(avg).margin(1e-9));
  }
  const Real a1 = average_queue(two, 0, 0.0, 0.5);
  const Real a2 = average_queue(two, 0, 0.5, 1.0);
  CHECK(0.5 * (a1 + a2) == Catch::Approx(avg).margin(1e-12));
  CHECK_THROWS_AS(average_queue(two, 0, 1.5, 2.5), WindowNotCovered);
}

TEST_CASE("tandem delay at the aligned and misaligned offsets") {
  // Departures from the first intersection reach the second after half a
  // cycle.  Greens aligned with the arriving platoon leave it unqueued;
  // fully misaligned greens store the whole platoon.
  const auto aligned = find_periodic_orbit(testing::tandem(0.5));
  CHECK(delay_per_vehicle(aligned.cycle, 1, 0.0, 1.0) == Catch::Approx(0.0).margin(1e-9));
  CHECK(average_queue(aligned.cycle, 1, 0.0, 1.0) <= 1e-9);

  const auto worst = find_periodic_orbit(testing::tandem(0.0));
  CHECK(delay_per_vehicle(worst.cycle, 1, 0.0, 1.0) ==
        Catch::Approx(23.0 / 48.0).margin(1e-9));
  // Throughput over a period is the full unit inflow.
  CHECK(worst.cycle.integral_b(1, 0.0, 1.0) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("delay needs throughput") {
  Network dead(1.0, {RateProfile::constant(1.0, 0.0)}, {RateProfile::constant(1.0, 1.0)}, {});
  const auto traj = simulate(dead, 1.0);
  CHECK_THROWS_AS(delay_per_vehicle(traj, 0, 0.0, 1.0), NoThroughput);
}

TEST_CASE("wasted green on the orbit equals the mean-rate slack") {
  const auto orbit = find_periodic_orbit(testing::example1());
  CHECK(wasted_green(orbit.cycle, 0, 0.0, 1.0) == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("wasted green vanishes while the queue is saturated") {
  const auto net = testing::example1();
  NetworkState init = zero_state(net);
  init.queue[0] = 1.5;
  const auto traj = simulate(net, init, 1.4);
  // x stays positive until 1.5, so no service is wasted before that.
  CHECK(wasted_green(traj, 0, 0.0, 1.4) == 0.0);
}

TEST_CASE("wasted green vanishes without service") {
  Network red(1.0, {RateProfile::constant(1.0, 0.5)}, {RateProfile::constant(1.0, 0.0)}, {});
  const auto traj = simulate(red, 2.0);
  CHECK(wasted_green(traj, 0, 0.0, 2.0) == 0.0);
}

TEST_CASE("webster delay formula") {
  // T = 1, g = 1/2, q = 1, x = 2/3:
  // 3/16 + 2/3 - 0.65 (2/3)^{4.5} = 0.74934...
  const Real d = webster_delay({1.0, 0.5, 1.0, 2.0 / 3.0});
  CHECK(d == Catch::Approx(3.0 / 16.0 + 2.0 / 3.0 -
                           0.65 * std::pow(2.0 / 3.0, 4.5)).margin(1e-12));
  CHECK(d == Catch::Approx(0.7493).margin(5e-4));

  // x = 0: only the uniform term survives.
  CHECK(webster_delay({2.0, 0.5, 1.0, 0.0}) ==
        Catch::Approx(2.0 * 0.75 * 0.75 / 2.0).margin(1e-12));
  // All-green with no flow ratio: no delay.
  CHECK(webster_delay({1.0, 1.0, 1.0, 0.0}) == 0.0);

  CHECK_THROWS_AS(webster_delay({1.0, 0.5, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(webster_delay({1.0, 1.5, 1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(webster_delay({1.0, 0.5, 0.0, 0.5}), DomainError);
}

TEST_CASE("offset sweep spans the full delay range") {
  const auto points = sweep_offset(testing::tandem(0.0), 1, 16);
  REQUIRE(points.size() == 16);
  Real lo = kInf, hi = 0;
  for (const auto& p : points) {
    lo = std::min(lo, p.delay);
    hi = std::max(hi, p.delay);
    CHECK(p.delay >= 0.0);
  }
  CHECK(lo <= 1e-6);
  CHECK(hi == Catch::Approx(23.0 / 48.0).margin(1e-6));
}

TEST_CASE("sweep requires an upstream feeder") {
  CHECK_THROWS_AS(sweep_offset(testing::example1(), 0, 8), DomainError);
}

TEST_CASE("zero-demand sweep yields an all-zero delay column") {
  Network quiet(1.0,
                {RateProfile::constant(1.0, 0.0), RateProfile::constant(1.0, 0.0)},
                {RateProfile(1.0, {{0.0, 1.0}, {0.5, 0.0}}),
                 RateProfile(1.0, {{0.0, 1.0}, {0.5, 0.0}})},
                {{0, 1, 0.5, 0.25}});
  for (const auto& p : sweep_offset(quiet, 1, 8)) CHECK(p.delay == 0.0);
}
