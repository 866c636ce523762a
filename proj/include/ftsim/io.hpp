#pragma once

#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftsim/config_io.hpp"
#include "ftsim/metrics.hpp"
#include "ftsim/network.hpp"
#include "ftsim/oracle.hpp"
#include "ftsim/orbit.hpp"
#include "ftsim/stability.hpp"
#include "ftsim/sweep.hpp"
#include "ftsim/trajectory.hpp"

namespace ftsim {

/// Uniformly sampled trajectory CSV: `t,queue,x,b,y,v`, rows ordered by time
/// then queue.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const std::vector<std::string>& ids, Real sample_interval) {
  out << "t,queue,x,b,y,v\n";
  out << std::setprecision(12);
  const Real t0 = traj.start_time();
  const Real t1 = traj.end_time();
  for (Real t = t0; t <= t1 + 1e-12; t += sample_interval) {
    const Real tc = std::min(t, t1);
    for (int i = 0; i < traj.queue_count(); ++i) {
      out << tc << ',' << ids[static_cast<std::size_t>(i)] << ',' << traj.x_at(i, tc) << ','
          << traj.b_at(i, tc) << ',' << traj.y_at(i, tc) << ',' << traj.v_at(i, tc) << '\n';
    }
  }
}

/// Event-exact trajectory: one record per event with per-queue x, b, y, v.
inline nlohmann::ordered_json trajectory_json(const Trajectory& traj,
                                              const std::vector<std::string>& ids) {
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < traj.times().size(); ++k) {
    nlohmann::ordered_json ev;
    ev["t"] = traj.times()[k];
    nlohmann::ordered_json queues;
    for (int i = 0; i < traj.queue_count(); ++i) {
      queues[ids[static_cast<std::size_t>(i)]] = {{"x", traj.x_event(i, k)},
                                                  {"a", traj.a_event(i, k)},
                                                  {"b", traj.b_event(i, k)},
                                                  {"y", traj.y_event(i, k)},
                                                  {"v", traj.v_event(i, k)}};
    }
    ev["queues"] = std::move(queues);
    events.push_back(std::move(ev));
  }
  return {{"events", std::move(events)}};
}

inline nlohmann::ordered_json validation_json(const ValidationReport& report) {
  return {{"valid", report.ok()}, {"violations", report.violations}};
}

inline nlohmann::ordered_json stability_json(const StabilityReport& report,
                                             const std::vector<std::string>& ids) {
  nlohmann::ordered_json queues = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    queues.push_back({{"id", ids[i]},
                      {"mean_entry", report.mean_entry[i]},
                      {"mean_service", report.mean_service[i]},
                      {"effective_demand", report.effective_demand[i]},
                      {"margin", report.margin[i]},
                      {"predicted_wasted_service", report.predicted_wasted_service[i]}});
  }
  return {{"stable", report.stable},
          {"epsilon", report.epsilon},
          {"spectral_radius", report.spectral_radius},
          {"queues", std::move(queues)}};
}

inline nlohmann::ordered_json orbit_report_json(const PeriodicOrbit& orbit,
                                                const OrbitCertificate& cert,
                                                const std::vector<std::string>& ids) {
  nlohmann::ordered_json anchor = nlohmann::ordered_json::array();
  for (Real x : orbit.anchor.queue) anchor.push_back(x);
  nlohmann::ordered_json queues = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < cert.queues.size(); ++i) {
    const auto& q = cert.queues[i];
    queues.push_back({{"id", ids[i]},
                      {"cleared", q.cleared},
                      {"clearing_time", q.clearing_time},
                      {"measured_unused_service", q.measured_unused},
                      {"predicted_unused_service", q.predicted_unused}});
  }
  nlohmann::ordered_json convergence;
  convergence["kind"] = orbit.convergence.type == ConvergenceType::ExactFiniteTime
                            ? "exact_finite_time"
                            : "geometric_to_tolerance";
  convergence["iterations"] = orbit.iterations;
  convergence["settled_after"] = orbit.convergence.settled_after;
  if (orbit.convergence.type == ConvergenceType::GeometricToTolerance)
    convergence["contraction_rate"] = orbit.convergence.contraction_rate;
  convergence["iterate_distances"] = orbit.iterate_distances;
  return {{"anchor_queue", std::move(anchor)},
          {"convergence", std::move(convergence)},
          {"poincare_residual", cert.poincare_residual},
          {"passes", cert.passes},
          {"queues", std::move(queues)}};
}

struct MetricsRow {
  std::string id;
  Real avg_queue = 0;
  Real delay = 0;
  bool has_delay = false;
  Real wasted = 0;
};

/// Metrics CSV: `queue,avg_queue,delay_per_vehicle,wasted_green`.
inline void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "queue,avg_queue,delay_per_vehicle,wasted_green\n";
  out << std::setprecision(12);
  for (const auto& r : rows) {
    out << r.id << ',' << r.avg_queue << ',';
    if (r.has_delay)
      out << r.delay;
    else
      out << "nan";
    out << ',' << r.wasted << '\n';
  }
}

/// Offset sweep CSV: `offset,delay`.
inline void write_sweep_csv(std::ostream& out, const std::vector<OffsetSweepPoint>& points) {
  out << "offset,delay\n";
  out << std::setprecision(12);
  for (const auto& p : points) out << p.offset << ',' << p.delay << '\n';
}

/// Discrete-vehicle trajectory CSV: `t,queue,count,normalized`.
inline void write_discrete_csv(std::ostream& out, const DiscreteTrajectory& traj,
                               const std::vector<std::string>& ids, int stride = 1) {
  out << "t,queue,count,normalized\n";
  out << std::setprecision(12);
  for (std::size_t k = 0; k < traj.step_count(); k += static_cast<std::size_t>(stride)) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      out << static_cast<Real>(k) * traj.step << ',' << ids[i] << ','
          << traj.counts[i][k] << ',' << traj.normalized(static_cast<int>(i), k) << '\n';
    }
  }
}

}  // namespace ftsim
