#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "ftsim/common.hpp"
#include "ftsim/network.hpp"
#include "ftsim/state.hpp"
#include "ftsim/step_function.hpp"

namespace ftsim {

/// Exact trajectory of a simulation run on a shared event-time grid.
///
/// At event time t_k the row stores the queue levels x and cumulative unused
/// service v; the rates a, b, y are constant on [t_k, t_{k+1}).  Queue levels
/// are linear between events, so interpolation reproduces the trajectory
/// exactly.
class Trajectory {
 public:
  Trajectory(Network net, NetworkState init)
      : net_(std::move(net)), init_(std::move(init)) {
    const auto n = static_cast<std::size_t>(net_.queue_count());
    x_.resize(n);
    a_.resize(n);
    b_.resize(n);
    y_.resize(n);
    v_.resize(n);
  }

  void append_event(Real t, const std::vector<Real>& x, const std::vector<Real>& a,
                    const std::vector<Real>& b, const std::vector<Real>& y,
                    const std::vector<Real>& v) {
    if (!times_.empty() && t <= times_.back()) {
      // Same-instant rewrite: the batch of simultaneous events settles on one row.
      const std::size_t k = times_.size() - 1;
      for (std::size_t i = 0; i < x_.size(); ++i) {
        x_[i][k] = x[i];
        a_[i][k] = a[i];
        b_[i][k] = b[i];
        y_[i][k] = y[i];
        v_[i][k] = v[i];
      }
      return;
    }
    times_.push_back(t);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      x_[i].push_back(x[i]);
      a_[i].push_back(a[i]);
      b_[i].push_back(b[i]);
      y_[i].push_back(y[i]);
      v_[i].push_back(v[i]);
    }
  }

  [[nodiscard]] const Network& network() const { return net_; }
  [[nodiscard]] const NetworkState& initial_state() const { return init_; }
  [[nodiscard]] int queue_count() const { return net_.queue_count(); }
  [[nodiscard]] const std::vector<Real>& times() const { return times_; }
  [[nodiscard]] Real start_time() const { return times_.front(); }
  [[nodiscard]] Real end_time() const { return times_.back(); }
  [[nodiscard]] std::size_t event_count() const { return times_.size(); }

  [[nodiscard]] Real x_at(int i, Real t) const { return interp(x_[idx(i)], t); }
  [[nodiscard]] Real v_at(int i, Real t) const { return interp(v_[idx(i)], t); }
  [[nodiscard]] Real a_at(int i, Real t) const { return step_at(a_[idx(i)], t); }
  [[nodiscard]] Real b_at(int i, Real t) const { return step_at(b_[idx(i)], t); }
  [[nodiscard]] Real y_at(int i, Real t) const { return step_at(y_[idx(i)], t); }

  /// Left limit of the departure rate at t.
  [[nodiscard]] Real b_before(int i, Real t) const { return step_before(b_[idx(i)], t); }

  [[nodiscard]] Real x_event(int i, std::size_t k) const { return x_[idx(i)][k]; }
  [[nodiscard]] Real a_event(int i, std::size_t k) const { return a_[idx(i)][k]; }
  [[nodiscard]] Real b_event(int i, std::size_t k) const { return b_[idx(i)][k]; }
  [[nodiscard]] Real y_event(int i, std::size_t k) const { return y_[idx(i)][k]; }
  [[nodiscard]] Real v_event(int i, std::size_t k) const { return v_[idx(i)][k]; }

  /// Exact integral of the queue length over [t0, t1].
  [[nodiscard]] Real integral_x(int i, Real t0, Real t1) const {
    require_window(t0, t1);
    const auto& vals = x_[idx(i)];
    Real total = 0;
    for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
      const Real lo = std::max(t0, times_[k]);
      const Real hi = std::min(t1, times_[k + 1]);
      if (hi <= lo) continue;
      total += 0.5 * (interp_on(vals, k, lo) + interp_on(vals, k, hi)) * (hi - lo);
    }
    return total;
  }

  /// Exact integral of a rate series over [t0, t1].
  [[nodiscard]] Real integral_b(int i, Real t0, Real t1) const {
    return integral_steps(b_[idx(i)], t0, t1);
  }
  [[nodiscard]] Real integral_y(int i, Real t0, Real t1) const {
    return integral_steps(y_[idx(i)], t0, t1);
  }
  [[nodiscard]] Real integral_a(int i, Real t0, Real t1) const {
    return integral_steps(a_[idx(i)], t0, t1);
  }

  /// Departure rate of queue i as an absolute-time step function over the
  /// whole run, prefixed by the initial history.
  [[nodiscard]] StepFunction departure_steps(int i) const {
    StepFunction out = init_.departures[idx(i)];
    const auto& vals = b_[idx(i)];
    for (std::size_t k = 0; k < times_.size(); ++k) out.append(times_[k], vals[k]);
    out.compress();
    return out;
  }

  /// State at time t (anchored there): queue levels plus the departure
  /// history restricted to [t - max_delay, t] and shifted to [-max_delay, 0].
  [[nodiscard]] NetworkState state_at(Real t) const {
    require_window(t, t);
    NetworkState s;
    const int n = queue_count();
    s.queue.resize(static_cast<std::size_t>(n));
    s.departures.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      s.queue[static_cast<std::size_t>(i)] = x_at(i, t);
      const StepFunction full = departure_steps(i);
      s.departures[static_cast<std::size_t>(i)] = full.window(t - net_.max_delay(), t, -t);
    }
    return s;
  }

  [[nodiscard]] NetworkState final_state() const { return state_at(end_time()); }

 private:
  static std::size_t idx(int i) { return static_cast<std::size_t>(i); }

  void require_window(Real t0, Real t1) const {
    if (times_.empty() || t0 < times_.front() - kTol || t1 > times_.back() + kTol)
      throw WindowNotCovered("trajectory does not cover the requested window");
  }

  [[nodiscard]] std::size_t row_for(Real t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t + snap(t));
    if (it == times_.begin()) return 0;
    const auto k = static_cast<std::size_t>(it - times_.begin() - 1);
    return std::min(k, times_.size() - 1);
  }

  static Real snap(Real t) { return 1e-12 * std::max<Real>(1.0, std::abs(t)); }

  [[nodiscard]] Real interp(const std::vector<Real>& vals, Real t) const {
    require_window(t, t);
    const std::size_t k = row_for(t);
    if (k + 1 >= times_.size()) return vals.back();
    const Real span = times_[k + 1] - times_[k];
    const Real w = span > 0 ? (t - times_[k]) / span : 0.0;
    return vals[k] + w * (vals[k + 1] - vals[k]);
  }

  [[nodiscard]] Real interp_on(const std::vector<Real>& vals, std::size_t k, Real t) const {
    const Real span = times_[k + 1] - times_[k];
    const Real w = span > 0 ? (t - times_[k]) / span : 0.0;
    return vals[k] + w * (vals[k + 1] - vals[k]);
  }

  [[nodiscard]] Real step_at(const std::vector<Real>& vals, Real t) const {
    require_window(t, t);
    return vals[row_for(t)];
  }

  [[nodiscard]] Real step_before(const std::vector<Real>& vals, Real t) const {
    require_window(t, t);
    auto it = std::lower_bound(times_.begin(), times_.end(), t - snap(t));
    if (it == times_.begin()) return vals.front();
    return vals[static_cast<std::size_t>(it - times_.begin() - 1)];
  }

  [[nodiscard]] Real integral_steps(const std::vector<Real>& vals, Real t0, Real t1) const {
    require_window(t0, t1);
    if (t1 <= t0) return 0.0;
    Real total = 0;
    for (std::size_t k = 0; k < times_.size(); ++k) {
      const Real lo = std::max(t0, times_[k]);
      const Real hi = std::min(t1, (k + 1 < times_.size()) ? times_[k + 1] : t1);
      if (hi > lo) total += vals[k] * (hi - lo);
    }
    return total;
  }

  Network net_;
  NetworkState init_;
  std::vector<Real> times_;
  std::vector<std::vector<Real>> x_, a_, b_, y_, v_;
};

/// Total vehicles present at time t of a run (in queues plus in transit).
inline Real total_vehicles(const Trajectory& traj, Real t) {
  return total_vehicles(traj.network(), traj.state_at(t));
}

/// Arrival rate seen by queue i at time t of a run.
inline Real arrival_rate(const Trajectory& traj, int i, Real t) {
  return traj.a_at(i, t);
}

}  // namespace ftsim
