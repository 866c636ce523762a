// ftsim command-line front end: parse a network config, run analyses, emit
// machine-readable reports and plot-ready data.
//
// Exit codes: 0 success; 1 usage; 2 config parse failure; 3 validation
// failure or invalid argument; 4 unstable network / routing that keeps
// vehicles circulating forever; 5 runtime model error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftsim/blocking.hpp"
#include "ftsim/config_io.hpp"
#include "ftsim/io.hpp"
#include "ftsim/metrics.hpp"
#include "ftsim/oracle.hpp"
#include "ftsim/orbit.hpp"
#include "ftsim/simulator.hpp"
#include "ftsim/stability.hpp"
#include "ftsim/svg.hpp"
#include "ftsim/sweep.hpp"

namespace {

using namespace ftsim;

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvalid = 3;
constexpr int kExitUnstable = 4;
constexpr int kExitRuntime = 5;

struct CliError {
  int code;
  std::string message;
};

NetworkConfig load_and_check(const std::string& path, bool must_be_valid = true) {
  const NetworkConfig config = load_config(path);
  if (must_be_valid) {
    const auto report = validate(config.network);
    if (!report.ok()) {
      std::ostringstream msg;
      msg << "config has " << report.violations.size() << " violation(s):";
      for (const auto& v : report.violations) msg << "\n  - " << v;
      throw CliError{kExitInvalid, msg.str()};
    }
  }
  return config;
}

std::vector<Real> parse_levels(const std::string& text, int n) {
  std::vector<Real> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (static_cast<int>(out.size()) != n)
    throw CliError{kExitInvalid, "expected " + std::to_string(n) + " initial queue levels"};
  return out;
}

NetworkState initial_state(const Network& net, const std::optional<std::string>& init) {
  NetworkState state = zero_state(net);
  if (init) state.queue = parse_levels(*init, net.queue_count());
  return state;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw CliError{kExitRuntime, "cannot write " + path};
  out << content;
}

void export_trajectory(const Trajectory& traj, const std::vector<std::string>& ids,
                       const std::optional<std::string>& csv,
                       const std::optional<std::string>& json_path,
                       const std::optional<std::string>& svg, Real sample) {
  if (csv) {
    std::ostringstream out;
    write_trajectory_csv(out, traj, ids, sample);
    write_file(*csv, out.str());
  }
  if (json_path) write_file(*json_path, trajectory_json(traj, ids).dump(2) + "\n");
  if (svg) {
    std::vector<SvgSeries> series;
    for (int i = 0; i < traj.queue_count(); ++i) {
      SvgSeries s;
      s.name = "x(" + ids[static_cast<std::size_t>(i)] + ")";
      for (std::size_t k = 0; k < traj.times().size(); ++k)
        s.points.emplace_back(traj.times()[k], traj.x_event(i, k));
      series.push_back(std::move(s));
    }
    write_file(*svg, svg_line_chart(series, "queue length", "t", "x"));
  }
}

int run(int argc, char** argv) {
  CLI::App app{"ftsim: exact fluid-queue analysis of fixed-time signalized networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> init_a, init_b, csv, json_out, svg, report_path, emit_path;
  Real horizon = 10.0;
  Real sample = 0.05;
  Real tol = 1e-9;
  int max_periods = 100000;
  int resolution = 48;
  int threads = 0;
  std::string queue_id;
  std::string mode_name = "ratecapped";
  Real grid_step = 1e-2;
  std::string gran_list = "10,100,1000";

  auto* validate_cmd = app.add_subcommand("validate", "check a network config");
  validate_cmd->add_option("config", config_path)->required();
  validate_cmd->add_option("--emit-normalized", emit_path, "re-emit the parsed config");

  auto* stability_cmd = app.add_subcommand("stability", "mean-rate stability report");
  stability_cmd->add_option("config", config_path)->required();
  stability_cmd->add_option("--json", json_out, "write the report as JSON");

  auto* simulate_cmd = app.add_subcommand("simulate", "event-exact trajectory");
  simulate_cmd->add_option("config", config_path)->required();
  simulate_cmd->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--init", init_a, "comma-separated initial queue levels");
  simulate_cmd->add_option("--sample", sample, "CSV sample interval")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--csv", csv, "sampled trajectory CSV path");
  simulate_cmd->add_option("--json", json_out, "event-exact trajectory JSON path");
  simulate_cmd->add_option("--svg", svg, "queue-vs-time SVG path");

  auto* orbit_cmd = app.add_subcommand("orbit", "periodic orbit and certificate");
  orbit_cmd->add_option("config", config_path)->required();
  orbit_cmd->add_option("--tol", tol)->check(CLI::PositiveNumber);
  orbit_cmd->add_option("--max-periods", max_periods)->check(CLI::PositiveNumber);
  orbit_cmd->add_option("--report", report_path, "orbit report JSON path");
  orbit_cmd->add_option("--csv", csv, "one-period trajectory CSV path");
  orbit_cmd->add_option("--sample", sample)->check(CLI::PositiveNumber);
  orbit_cmd->add_option("--svg", svg, "orbit queue-vs-time SVG path");

  auto* couple_cmd = app.add_subcommand("couple", "coupling time of two initial states");
  couple_cmd->add_option("config", config_path)->required();
  couple_cmd->add_option("--init-a", init_a, "first initial queue levels")->required();
  couple_cmd->add_option("--init-b", init_b, "second initial queue levels")->required();
  couple_cmd->add_option("--max-periods", max_periods)->check(CLI::PositiveNumber);

  auto* metrics_cmd = app.add_subcommand("metrics", "per-queue orbit performance measures");
  metrics_cmd->add_option("config", config_path)->required();
  metrics_cmd->add_option("--csv", csv, "metrics CSV path");
  metrics_cmd->add_option("--json", json_out, "metrics JSON path");

  auto* sweep_cmd = app.add_subcommand("sweep-offset", "delay vs service offset at a queue");
  sweep_cmd->add_option("config", config_path)->required();
  sweep_cmd->add_option("--queue", queue_id, "queue id whose service offset is swept")
      ->required();
  sweep_cmd->add_option("--resolution", resolution)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threads", threads);
  sweep_cmd->add_option("--csv", csv, "sweep CSV path");
  sweep_cmd->add_option("--svg", svg, "offset-vs-delay SVG path");

  auto* blocking_cmd = app.add_subcommand("blocking", "finite-storage simulation");
  blocking_cmd->add_option("config", config_path)->required();
  blocking_cmd->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
  blocking_cmd->add_option("--init", init_a, "comma-separated initial queue levels");
  blocking_cmd->add_option("--mode", mode_name)->check(CLI::IsMember({"ratecapped", "strict"}));
  blocking_cmd->add_option("--step", grid_step, "strict-gate review step")
      ->check(CLI::PositiveNumber);
  blocking_cmd->add_option("--sample", sample)->check(CLI::PositiveNumber);
  blocking_cmd->add_option("--csv", csv, "sampled trajectory CSV path");
  blocking_cmd->add_option("--json", json_out, "event-exact trajectory JSON path");

  std::optional<std::string> discrete_csv;
  auto* oracle_cmd = app.add_subcommand("oracle-compare", "fluid vs discrete-vehicle errors");
  oracle_cmd->add_option("config", config_path)->required();
  oracle_cmd->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--init", init_a, "comma-separated initial queue levels");
  oracle_cmd->add_option("--granularities", gran_list, "comma-separated vehicle counts");
  oracle_cmd->add_option("--threads", threads);
  oracle_cmd->add_option("--csv", csv, "error table CSV path");
  oracle_cmd->add_option("--discrete-csv", discrete_csv,
                         "vehicle-count trajectory CSV at the finest granularity");

  WebsterInput webster;
  auto* webster_cmd = app.add_subcommand("webster", "Webster delay approximation");
  webster_cmd->add_option("--T", webster.cycle, "cycle length")->required();
  webster_cmd->add_option("--g", webster.green, "green time")->required();
  webster_cmd->add_option("--q", webster.flow, "flow")->required();
  webster_cmd->add_option("--x", webster.ratio, "flow-to-capacity ratio")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or requested help
    return code == 0 ? 0 : kExitUsage;
  }

  if (validate_cmd->parsed()) {
    const NetworkConfig config = load_and_check(config_path, false);
    const auto report = validate(config.network);
    std::cout << validation_json(report).dump(2) << "\n";
    if (emit_path) write_file(*emit_path, emit_config(config));
    return report.ok() ? 0 : kExitInvalid;
  }

  if (stability_cmd->parsed()) {
    const NetworkConfig config = load_and_check(config_path);
    const auto report = stability_report(config.network);
    const auto j = stability_json(report, config.queue_ids);
    std::cout << j.dump(2) << "\n";
    if (json_out) write_file(*json_out, j.dump(2) + "\n");
    return 0;
  }

  if (simulate_cmd->parsed()) {
    const NetworkConfig config = load_and_check(config_path);
    const auto state = initial_state(config.network, init_a);
    const auto traj = simulate(config.network, state, horizon);
    export_trajectory(traj, config.queue_ids, csv, json_out, svg, sample);
    std::cout << "events: " << traj.event_count() << "\n";
    for (int i = 0; i < config.network.queue_count(); ++i) {
      std::cout << config.queue_ids[static_cast<std::size_t>(i)]
                << ": x(end)=" << traj.x_at(i, horizon) << " wasted=" << traj.v_at(i, horizon)
                << "\n";
    }
    return 0;
  }

  if (orbit_cmd->parsed()) {
    const NetworkConfig config = load_and_check(config_path);
    const auto orbit = find_periodic_orbit(config.network, tol, max_periods);
    const auto cert = verify_orbit(config.network, orbit);
    const auto j = orbit_report_json(orbit, cert, config.queue_ids);
    std::cout << j.dump(2) << "\n";
    if (report_path) write_file(*report_path, j.dump(2) + "\n");
    if (csv || svg) export_trajectory(orbit.cycle, config.queue_ids, csv, {}, svg, sample);
    return 0;
  }

  if (couple_cmd->parsed()) {
    const NetworkConfig config = load_and_check(config_path);
    const auto sa = initial_state(config.network, init_a);
    const auto sb = initial_state(config.network, init_b);
    const auto result = coupling_time(config.network, sa, sb, max_periods);
    if (result.coupled) {
      std::cout << "coupled at t=" << result.time << " (" << result.periods << " periods)\n";
    } else {
      std::cout << "not coupled within " << max_periods << " periods\n";
    }
    return 0;
  }

  if (metrics_cmd->parsed()) {
    const NetworkConfig config = load_and_check(config_path);
    const auto orbit = find_periodic_orbit(config.network);
    const Real T = config.network.period();
    std::vector<MetricsRow> rows;
    for (int i = 0; i < config.network.queue_count(); ++i) {
      MetricsRow row;
      row.id = config.queue_ids[static_cast<std::size_t>(i)];
      row.avg_queue = average_queue(orbit.cycle, i, 0.0, T);
      row.wasted = wasted_green(orbit.cycle, i, 0.0, T);
      try {
        row.delay = delay_per_vehicle(orbit.cycle, i, 0.0, T);
        row.has_delay = true;
      } catch (const NoThroughput&) {
        row.has_delay = false;
      }
      rows.push_back(row);
    }
    std::ostringstream out;
    write_metrics_csv(out, rows);
    std::cout << out.str();
    if (csv) write_file(*csv, out.str());
    if (json_out) {
      nlohmann::ordered_json j = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        nlohmann::ordered_json row{{"queue", r.id},
                                   {"avg_queue", r.avg_queue},
                                   {"wasted_green", r.wasted}};
        if (r.has_delay) row["delay_per_vehicle"] = r.delay;
        j.push_back(std::move(row));
      }
      write_file(*json_out, j.dump(2) + "\n");
    }
    return 0;
  }

  if (sweep_cmd->parsed()) {
    const NetworkConfig config = load_and_check(config_path);
    const int queue = config.index_of(queue_id);
    if (queue < 0) throw CliError{kExitInvalid, "unknown queue id: " + queue_id};
    const auto points = sweep_offset(config.network, queue, resolution, threads);
    std::ostringstream out;
    write_sweep_csv(out, points);
    std::cout << out.str();
    if (csv) write_file(*csv, out.str());
    if (svg) {
      SvgSeries series{"delay(" + queue_id + ")", {}};
      for (const auto& p : points) series.points.emplace_back(p.offset, p.delay);
      write_file(*svg, svg_line_chart({series}, "offset sweep", "offset", "delay"));
    }
    return 0;
  }

  if (blocking_cmd->parsed()) {
    const NetworkConfig config = load_and_check(config_path);
    const auto state = initial_state(config.network, init_a);
    const auto mode = mode_name == "strict" ? BlockingMode::strict_gate(grid_step)
                                            : BlockingMode::rate_capped();
    const auto result = simulate_blocking(config.network, config.limits, state, horizon, mode);
    export_trajectory(result.trajectory, config.queue_ids, csv, json_out, {}, sample);
    const Real T = config.network.period();
    const auto report = detect_gridlock(result.trajectory, config.limits,
                                        std::max(0.0, horizon - T), horizon);
    if (report.gridlocked) {
      std::cout << "gridlocked queues:";
      for (int q : report.queues) std::cout << ' ' << config.queue_ids[static_cast<std::size_t>(q)];
      std::cout << "\n";
    } else {
      std::cout << "no gridlock over the final period\n";
    }
    for (int i = 0; i < config.network.queue_count(); ++i) {
      std::cout << config.queue_ids[static_cast<std::size_t>(i)]
                << ": x(end)=" << result.trajectory.x_at(i, horizon)
                << " spilled=" << result.spilled[static_cast<std::size_t>(i)] << "\n";
    }
    return 0;
  }

  if (oracle_cmd->parsed()) {
    const NetworkConfig config = load_and_check(config_path);
    const auto state = initial_state(config.network, init_a);
    std::vector<long> grans;
    std::stringstream ss(gran_list);
    std::string item;
    while (std::getline(ss, item, ',')) grans.push_back(std::stol(item));
    if (grans.empty()) throw CliError{kExitInvalid, "granularity list is empty"};
    const Real step = config.has_oracle ? config.oracle.step : 1e-3;
    const auto cmp = compare_fluid_discrete(config.network, state, horizon, grans, step, threads);
    std::ostringstream out;
    out << "granularity,sup_error\n";
    for (std::size_t k = 0; k < cmp.granularities.size(); ++k)
      out << cmp.granularities[k] << ',' << cmp.sup_errors[k] << '\n';
    std::cout << out.str();
    if (csv) write_file(*csv, out.str());
    if (discrete_csv) {
      const long finest = *std::max_element(grans.begin(), grans.end());
      const auto counts = discrete_simulate(config.network, {finest, step}, state, horizon);
      std::ostringstream traj_out;
      write_discrete_csv(traj_out, counts, config.queue_ids);
      write_file(*discrete_csv, traj_out.str());
    }
    return 0;
  }

  if (webster_cmd->parsed()) {
    std::cout << webster_delay(webster) << "\n";
    return 0;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const ConfigParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SpectralRadiusError& e) {
    std::cerr << "routing error: " << e.what() << "\n";
    return kExitUnstable;
  } catch (const UnstableNetwork& e) {
    std::cerr << "unstable network: " << e.what() << "\n";
    return kExitUnstable;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
