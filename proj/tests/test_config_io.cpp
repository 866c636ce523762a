#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ftsim/config_io.hpp"
#include "ftsim/io.hpp"
#include "ftsim/simulator.hpp"
#include "ftsim/svg.hpp"

using namespace ftsim;

namespace {

const char* kExampleConfig = R"({
  "period": 1.0,
  "queues": [
    {"id": "in", "entry_profile": [[0.0, 1.0]], "service_profile": [[0.0, 3.0], [0.5, 0.0]]},
    {"id": "out", "entry_profile": [[0.0, 0.0]], "service_profile": [[0.0, 3.0], [0.5, 0.0]]}
  ],
  "links": [{"from": "in", "to": "out", "ratio": 1.0, "delay": 0.5}],
  "storage": {"out": 2.5},
  "oracle": {"granularity": 500, "step": 0.002}
})";

}  // namespace

TEST_CASE("configs parse into networks") {
  const auto config = parse_config(kExampleConfig);
  CHECK(config.network.queue_count() == 2);
  CHECK(config.queue_ids[0] == "in");
  CHECK(config.network.entry(0).mean() == 1.0);
  CHECK(config.network.service(0).mean() == 1.5);
  REQUIRE(config.network.links().size() == 1);
  CHECK(config.network.links()[0].delay == 0.5);
  CHECK(config.limits.of(1) == 2.5);
  CHECK_FALSE(is_finite(config.limits.of(0)));
  CHECK(config.has_oracle);
  CHECK(config.oracle.granularity == 500);
  CHECK(validate(config.network).ok());
}

TEST_CASE("emitted configs re-parse to an identical network") {
  const auto config = parse_config(kExampleConfig);
  const std::string emitted = emit_config(config);
  const auto again = parse_config(emitted);
  CHECK(again.queue_ids == config.queue_ids);
  CHECK(again.network.period() == config.network.period());
  for (int i = 0; i < config.network.queue_count(); ++i) {
    CHECK(again.network.entry(i) == config.network.entry(i));
    CHECK(again.network.service(i) == config.network.service(i));
  }
  CHECK(again.network.links() == config.network.links());
  CHECK(again.limits.capacity == config.limits.capacity);
  CHECK(again.oracle.granularity == config.oracle.granularity);
  // And emission is a fixed point.
  CHECK(emit_config(again) == emitted);
}

TEST_CASE("malformed configs are rejected with ConfigParseError") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigParseError);
  CHECK_THROWS_AS(parse_config("{}"), ConfigParseError);
  CHECK_THROWS_AS(parse_config(R"({"period": 1.0, "queues": []})"), ConfigParseError);
  CHECK_THROWS_AS(parse_config(R"({"period": 1.0, "queues": [{"id": "a"}]})"),
                  ConfigParseError);
  CHECK_THROWS_AS(parse_config(R"({
    "period": 1.0,
    "queues": [{"id": "a", "entry_profile": [[0,1]], "service_profile": [[0,2]]}],
    "links": [{"from": "a", "to": "missing", "ratio": 0.5, "delay": 0.5}]
  })"),
                  ConfigParseError);
}

TEST_CASE("trajectory CSV has a header and deterministic order") {
  const auto config = parse_config(kExampleConfig);
  const auto traj = simulate(config.network, 2.0);
  std::ostringstream out;
  write_trajectory_csv(out, traj, config.queue_ids, 0.5);
  std::istringstream lines(out.str());
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "t,queue,x,b,y,v");
  int rows = 0;
  std::string prev;
  while (std::getline(lines, line)) {
    ++rows;
    if (rows % 2 == 1) CHECK(line.find(",in,") != std::string::npos);
    if (rows % 2 == 0) CHECK(line.find(",out,") != std::string::npos);
  }
  CHECK(rows == 2 * 5);  // samples at 0, 0.5, 1.0, 1.5, 2.0 for two queues
}

TEST_CASE("event-exact trajectory JSON carries per-queue rates") {
  const auto config = parse_config(kExampleConfig);
  const auto traj = simulate(config.network, 1.0);
  const auto j = trajectory_json(traj, config.queue_ids);
  REQUIRE(j.contains("events"));
  REQUIRE(j["events"].size() == traj.times().size());
  const auto& first = j["events"][0];
  CHECK(first["t"].get<Real>() == 0.0);
  CHECK(first["queues"].contains("in"));
  CHECK(first["queues"]["in"].contains("x"));
  CHECK(first["queues"]["in"].contains("v"));
}

TEST_CASE("metrics and sweep CSVs carry headers") {
  std::ostringstream metrics;
  write_metrics_csv(metrics, {{"a", 0.1, 0.2, true, 0.3}, {"b", 0.0, 0.0, false, 0.5}});
  CHECK(metrics.str().rfind("queue,avg_queue,delay_per_vehicle,wasted_green\n", 0) == 0);
  CHECK(metrics.str().find("nan") != std::string::npos);

  std::ostringstream sweep;
  write_sweep_csv(sweep, {{0.0, 0.1}, {0.5, 0.2}});
  CHECK(sweep.str().rfind("offset,delay\n", 0) == 0);
}

TEST_CASE("discrete trajectory CSV carries counts and normalized values") {
  const auto config = parse_config(kExampleConfig);
  const auto counts =
      discrete_simulate(config.network, {100, 1e-2}, zero_state(config.network), 1.0);
  std::ostringstream out;
  write_discrete_csv(out, counts, config.queue_ids, 10);
  std::istringstream lines(out.str());
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "t,queue,count,normalized");
  REQUIRE(std::getline(lines, line));
  CHECK(line.rfind("0,in,", 0) == 0);
}

TEST_CASE("svg chart is generated") {
  const std::string svg =
      svg_line_chart({{"x(t)", {{0.0, 0.5}, {0.25, 0.0}, {1.0, 0.5}}}}, "queue", "t", "x");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
