#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ftsim/rate_profile.hpp"

using namespace ftsim;

namespace {

RateProfile half_green(Real rate) {
  return RateProfile(1.0, {{0.0, rate}, {0.5, 0.0}});
}

}  // namespace

TEST_CASE("mean rate of a half-period service profile") {
  CHECK(half_green(3.0).mean() == Catch::Approx(1.5).margin(1e-12));
  CHECK(half_green(1.0).mean() == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("mean rate of a constant profile is the rate") {
  for (Real q : {0.0, 0.25, 1.0, 7.5}) {
    CHECK(RateProfile::constant(2.0, q).mean() == Catch::Approx(q).margin(1e-15));
  }
}

TEST_CASE("evaluation is right-continuous and periodic") {
  const auto c = half_green(3.0);
  CHECK(c.value_at(0.0) == 3.0);
  CHECK(c.value_at(0.49999999) == 3.0);
  CHECK(c.value_at(0.5) == 0.0);
  CHECK(c.value_at(0.75) == 0.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<Real> pick(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Real t = pick(rng) * 3.0 - 1.0;
    CHECK(c.value_at(t) == c.value_at(t + 1.0));
    CHECK(c.value_at(t) == c.value_at(t + 57.0));
  }
}

TEST_CASE("mean rate is linear in the profile") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<Real> pick(0.0, 4.0);
  for (int k = 0; k < 50; ++k) {
    const RateProfile p(2.0, {{0.0, pick(rng)}, {0.5, pick(rng)}, {1.25, pick(rng)}});
    const Real alpha = pick(rng);
    CHECK(p.scaled(alpha).mean() == Catch::Approx(alpha * p.mean()).margin(1e-12));
  }
}

TEST_CASE("exact integrals across period boundaries") {
  const auto c = half_green(3.0);
  CHECK(c.integral(0.0, 1.0) == Catch::Approx(1.5).margin(1e-12));
  CHECK(c.integral(0.25, 0.75) == Catch::Approx(0.75).margin(1e-12));
  CHECK(c.integral(-0.5, 0.5) == Catch::Approx(1.5).margin(1e-12));
  CHECK(c.integral(0.0, 10.0) == Catch::Approx(15.0).margin(1e-12));
  CHECK(c.integral(0.3, 0.3) == 0.0);
}

TEST_CASE("next breakpoint walks the periodic grid") {
  const auto c = half_green(3.0);
  CHECK(c.next_breakpoint_after(0.0) == Catch::Approx(0.5).margin(1e-12));
  CHECK(c.next_breakpoint_after(0.5) == Catch::Approx(1.0).margin(1e-12));
  CHECK(c.next_breakpoint_after(0.75) == Catch::Approx(1.0).margin(1e-12));
  CHECK(c.next_breakpoint_after(1.0) == Catch::Approx(1.5).margin(1e-12));
  CHECK(c.next_breakpoint_after(-0.25) == Catch::Approx(0.0).margin(1e-12));
  CHECK(RateProfile::constant(1.0, 2.0).next_breakpoint_after(0.25) ==
        Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("shifting a profile relabels time") {
  const auto c = half_green(3.0);
  const auto s = c.shifted(0.25);
  CHECK(s.value_at(0.25) == 3.0);
  CHECK(s.value_at(0.74) == 3.0);
  CHECK(s.value_at(0.75) == 0.0);
  CHECK(s.value_at(0.1) == 0.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<Real> pick(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Real theta = pick(rng);
    const Real t = pick(rng) * 2.0;
    CHECK(c.shifted(theta).value_at(t) == Catch::Approx(c.value_at(t - theta)).margin(1e-12));
  }
  // Shifting by a full period is the identity.
  const auto full = c.shifted(1.0);
  for (Real t : {0.0, 0.3, 0.5, 0.9}) CHECK(full.value_at(t) == c.value_at(t));
}

TEST_CASE("violations flag malformed profiles") {
  CHECK(half_green(3.0).violations().empty());
  CHECK(!RateProfile(1.0, {{0.1, 1.0}}).violations().empty());
  CHECK(!RateProfile(1.0, {{0.0, -1.0}}).violations().empty());
  CHECK(!RateProfile(1.0, {{0.0, 1.0}, {0.5, 2.0}, {0.5, 3.0}}).violations().empty());
  CHECK(!RateProfile(-1.0, {{0.0, 1.0}}).violations().empty());
}
