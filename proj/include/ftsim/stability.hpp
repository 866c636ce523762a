#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ftsim/common.hpp"
#include "ftsim/network.hpp"
#include "ftsim/routing.hpp"

namespace ftsim {

/// Mean-rate stability analysis: effective demand lambda = (I - R^T)^{-1} ebar
/// and per-queue margins cbar - lambda.
struct StabilityReport {
  std::vector<Real> mean_entry;                // ebar
  std::vector<Real> mean_service;              // cbar
  std::vector<Real> effective_demand;          // lambda
  std::vector<Real> margin;                    // cbar - lambda
  std::vector<Real> predicted_wasted_service;  // ybar = cbar - lambda
  bool stable = false;
  Real epsilon = 0;  // min margin when stable, 0 otherwise
  Real spectral_radius = 0;
};

namespace detail {

/// Solve A z = rhs by Gaussian elimination with partial pivoting (row-major A).
inline std::vector<Real> solve_dense(std::vector<Real> a, std::vector<Real> rhs) {
  const int n = static_cast<int>(rhs.size());
  auto at = [&a, n](int i, int j) -> Real& { return a[static_cast<std::size_t>(i) * n + j]; };
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(at(row, col)) > std::abs(at(pivot, col))) pivot = row;
    if (std::abs(at(pivot, col)) < 1e-14)
      throw SpectralRadiusError("routing system is singular; vehicles do not all leave");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(at(pivot, j), at(col, j));
      std::swap(rhs[static_cast<std::size_t>(pivot)], rhs[static_cast<std::size_t>(col)]);
    }
    for (int row = col + 1; row < n; ++row) {
      const Real f = at(row, col) / at(col, col);
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) at(row, j) -= f * at(col, j);
      rhs[static_cast<std::size_t>(row)] -= f * rhs[static_cast<std::size_t>(col)];
    }
  }
  std::vector<Real> z(static_cast<std::size_t>(n), 0.0);
  for (int row = n - 1; row >= 0; --row) {
    Real acc = rhs[static_cast<std::size_t>(row)];
    for (int j = row + 1; j < n; ++j) acc -= at(row, j) * z[static_cast<std::size_t>(j)];
    z[static_cast<std::size_t>(row)] = acc / at(row, row);
  }
  return z;
}

}  // namespace detail

/// Effective demand: solve (I - R^T) lambda = mean_entry.
inline std::vector<Real> effective_demand(const RoutingMatrix& routing,
                                          const std::vector<Real>& entry_means) {
  const int n = routing.size();
  std::vector<Real> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // (I - R^T)(i, j) = delta_ij - r(j, i)
      a[static_cast<std::size_t>(i) * n + j] = (i == j ? 1.0 : 0.0) - routing(j, i);
    }
  }
  return detail::solve_dense(std::move(a), entry_means);
}

/// Throws SpectralRadiusError when the routing matrix keeps vehicles in the
/// network (spectral radius >= 1 up to tolerance).
inline StabilityReport stability_report(const Network& net) {
  const int n = net.queue_count();
  StabilityReport report;
  report.spectral_radius = net.routing().spectral_radius();
  if (report.spectral_radius >= 1.0 - kTol)
    throw SpectralRadiusError("routing spectral radius >= 1; vehicles do not all leave");

  report.mean_entry.resize(static_cast<std::size_t>(n));
  report.mean_service.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    report.mean_entry[static_cast<std::size_t>(i)] = net.entry(i).mean();
    report.mean_service[static_cast<std::size_t>(i)] = net.service(i).mean();
  }
  report.effective_demand = effective_demand(net.routing(), report.mean_entry);

  report.margin.resize(static_cast<std::size_t>(n));
  report.stable = true;
  Real min_margin = kInf;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    report.margin[k] = report.mean_service[k] - report.effective_demand[k];
    min_margin = std::min(min_margin, report.margin[k]);
    if (!(report.margin[k] > 0)) report.stable = false;
  }
  report.predicted_wasted_service = report.margin;
  report.epsilon = report.stable ? min_margin : 0.0;
  return report;
}

}  // namespace ftsim
