#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ftsim/blocking.hpp"
#include "ftsim/orbit.hpp"
#include "ftsim/simulator.hpp"
#include "support/generators.hpp"
#include "support/networks.hpp"

using namespace ftsim;

namespace {

NetworkState state_with_x(const Network& net, std::vector<Real> x) {
  NetworkState s = zero_state(net);
  s.queue = std::move(x);
  return s;
}

/// The recirculating queue with constant external arrivals.
Network loop_with_entry(Real entry) {
  return Network(1.0, {RateProfile::constant(1.0, entry)},
                 {RateProfile(1.0, {{0.0, 1.0}, {0.5, 0.0}})}, {{0, 0, 0.5, 0.5}});
}

}  // namespace

TEST_CASE("full self-loop is gridlocked in both modes") {
  const auto net = testing::example2();
  const StorageLimits limits{{1.0}};
  const auto init = state_with_x(net, {1.0});

  for (const auto& mode : {BlockingMode::rate_capped(), BlockingMode::strict_gate(0.01)}) {
    const auto result = simulate_blocking(net, limits, init, 5.0, mode);
    for (Real t = 0.0; t <= 5.0; t += 0.1) {
      CHECK(result.trajectory.x_at(0, t) == Catch::Approx(1.0).margin(1e-12));
      CHECK(result.trajectory.b_at(0, t) == 0.0);
    }
    CHECK(result.spilled[0] == 0.0);
    const auto report = detect_gridlock(result.trajectory, limits, 0.0, 1.0);
    CHECK(report.gridlocked);
    REQUIRE(report.queues.size() == 1);
    CHECK(report.queues[0] == 0);
  }
}

TEST_CASE("empty self-loop stays empty") {
  const auto net = testing::example2();
  const StorageLimits limits{{1.0}};
  for (const auto& mode : {BlockingMode::rate_capped(), BlockingMode::strict_gate(0.01)}) {
    const auto result = simulate_blocking(net, limits, zero_state(net), 5.0, mode);
    for (Real t = 0.0; t <= 5.0; t += 0.1)
      CHECK(result.trajectory.x_at(0, t) == 0.0);
    CHECK_FALSE(detect_gridlock(result.trajectory, limits, 0.0, 1.0).gridlocked);
  }
}

TEST_CASE("the two full/empty solutions never couple") {
  const auto net = testing::example2();
  const StorageLimits limits{{1.0}};
  const auto stuck = simulate_blocking(net, limits, state_with_x(net, {1.0}), 100.0);
  const auto free = simulate_blocking(net, limits, zero_state(net), 100.0);
  for (Real t = 0.0; t <= 100.0; t += 0.5) {
    CHECK(stuck.trajectory.x_at(0, t) - free.trajectory.x_at(0, t) >=
          1.0 - 1e-9);
  }
}

TEST_CASE("unlimited storage reduces to the plain simulator exactly") {
  std::mt19937 rng(71);
  auto compare_exact = [](const Network& net, const NetworkState& init, Real horizon) {
    const auto plain = simulate(net, init, horizon);
    const auto blocked = simulate_blocking(net, StorageLimits::unlimited(net.queue_count()),
                                           init, horizon);
    REQUIRE(blocked.trajectory.times().size() == plain.times().size());
    for (std::size_t k = 0; k < plain.times().size(); ++k) {
      CHECK(blocked.trajectory.times()[k] == plain.times()[k]);
      for (int i = 0; i < net.queue_count(); ++i) {
        CHECK(blocked.trajectory.x_event(i, k) == plain.x_event(i, k));
        CHECK(blocked.trajectory.b_event(i, k) == plain.b_event(i, k));
        CHECK(blocked.trajectory.v_event(i, k) == plain.v_event(i, k));
      }
    }
  };
  compare_exact(testing::example1(), state_with_x(testing::example1(), {1.5}), 5.0);
  compare_exact(testing::example2(), state_with_x(testing::example2(), {0.4}), 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto net = testing::random_stable_network(rng);
    compare_exact(net, testing::random_state(rng, net), 5.0);
  }
}

TEST_CASE("strict-gate grid stepping stays within O(h) of the plain run") {
  const auto net = testing::example1();
  const auto init = state_with_x(net, {1.5});
  const auto plain = simulate(net, init, 3.0);
  const auto blocked = simulate_blocking(net, StorageLimits::unlimited(1), init, 3.0,
                                         BlockingMode::strict_gate(0.01));
  for (Real t = 0.0; t <= 3.0; t += 0.05) {
    CHECK(std::abs(blocked.trajectory.x_at(0, t) - plain.x_at(0, t)) <= 1e-9);
  }
}

TEST_CASE("ample storage leaves the periodic orbit untouched") {
  // Constant entry below 1/4 keeps the looped queue stable; storage above
  // the orbit's peak never gates.
  const auto net = loop_with_entry(0.2);
  const auto orbit = find_periodic_orbit(net);
  Real peak = 0;
  for (std::size_t k = 0; k < orbit.cycle.times().size(); ++k)
    peak = std::max(peak, orbit.cycle.x_event(0, k));
  CHECK(peak > 0.0);

  const StorageLimits limits{{peak + 0.1}};
  const auto blocked = simulate_blocking(net, limits, orbit.anchor, 3.0);
  const auto plain = simulate(net, orbit.anchor, 3.0);
  for (Real t = 0.0; t <= 3.0; t += 0.05)
    CHECK(blocked.trajectory.x_at(0, t) == plain.x_at(0, t));
  CHECK(blocked.spilled[0] == 0.0);
}

TEST_CASE("capacity is respected under pressure in both modes") {
  // Entry pushes the looped queue against a small cap.
  const auto net = loop_with_entry(0.2);
  const StorageLimits limits{{0.15}};
  const auto init = zero_state(net);
  for (const auto& mode : {BlockingMode::rate_capped(), BlockingMode::strict_gate(0.005)}) {
    const auto result = simulate_blocking(net, limits, init, 20.0, mode);
    Real worst = 0;
    for (std::size_t k = 0; k < result.trajectory.times().size(); ++k)
      worst = std::max(worst, result.trajectory.x_event(0, k));
    CHECK(worst <= 0.15 + kTol);
  }
}

TEST_CASE("random capped networks stay within capacity and conserve fluid") {
  std::mt19937 rng(73);
  std::uniform_real_distribution<Real> cap_pick(0.1, 0.6);
  for (int trial = 0; trial < 15; ++trial) {
    const auto net = testing::random_stable_network(rng);
    StorageLimits limits = StorageLimits::unlimited(net.queue_count());
    for (auto& c : limits.capacity)
      if (trial % 3 != 0) c = cap_pick(rng);
    const auto result = simulate_blocking(net, limits, zero_state(net), 10.0);

    for (std::size_t k = 0; k < result.trajectory.times().size(); ++k)
      for (int i = 0; i < net.queue_count(); ++i)
        CHECK(result.trajectory.x_event(i, k) <= limits.of(i) + kTol);

    // Conservation with spill: inflow = content change + exits + spills.
    Real inflow = 0, exits = 0, spilled = 0;
    for (int i = 0; i < net.queue_count(); ++i) {
      inflow += net.entry(i).integral(0.0, 10.0);
      exits += (1.0 - net.routing().row_sum(i)) * result.trajectory.integral_b(i, 0.0, 10.0);
      spilled += result.spilled[static_cast<std::size_t>(i)];
    }
    const Real start = total_vehicles(net, result.trajectory.state_at(0.0));
    const Real end = total_vehicles(net, result.trajectory.state_at(10.0));
    CHECK(std::abs(inflow + start - end - exits - spilled) <= 1e-8);
  }
}

TEST_CASE("mutually feeding full queues settle their gates") {
  // Two capped queues feeding each other (plus self-loops) share min-gates;
  // the factor solve must settle instead of flip-flopping between them.
  Network net(1.0,
              {RateProfile(1.0, {{0.0, 0.0}, {0.625, 0.0}}),
               RateProfile(1.0, {{0.0, 0.125}, {0.25, 0.375}}),
               RateProfile(1.0, {{0.0, 0.625}, {0.875, 0.5}})},
              {RateProfile(1.0, {{0.0, 0.0}, {0.375, 1.5}, {0.875, 0.0}}),
               RateProfile(1.0, {{0.0, 0.0}, {0.125, 1.75}, {0.625, 0.0}}),
               RateProfile(1.0, {{0.0, 2.625}, {0.5, 0.0}})},
              {{0, 0, 0.375, 0.25},
               {0, 2, 0.125, 0.625},
               {1, 0, 0.5, 0.125},
               {2, 2, 0.125, 1.125},
               {2, 0, 0.25, 0.875}});
  REQUIRE(validate(net).ok());
  const StorageLimits limits{{0.2659, 0.5653, 0.1427}};
  const auto result = simulate_blocking(net, limits, zero_state(net), 12.0);
  for (std::size_t k = 0; k < result.trajectory.times().size(); ++k)
    for (int i = 0; i < 3; ++i)
      CHECK(result.trajectory.x_event(i, k) <= limits.of(i) + kTol);
}

TEST_CASE("initial states above capacity are rejected") {
  const auto net = testing::example2();
  CHECK_THROWS_AS(
      simulate_blocking(net, StorageLimits{{0.5}}, state_with_x(net, {0.75}), 1.0),
      CapacityExceededAtInit);
}

TEST_CASE("gridlock detection ignores unlimited queues") {
  const auto net = testing::example1();
  const auto plain = simulate_blocking(net, StorageLimits::unlimited(1),
                                       state_with_x(net, {0.5}), 2.0);
  CHECK_FALSE(detect_gridlock(plain.trajectory, StorageLimits::unlimited(1), 0.0, 1.0)
                  .gridlocked);
}
