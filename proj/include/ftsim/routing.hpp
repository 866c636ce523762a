#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ftsim/common.hpp"

namespace ftsim {

/// Dense nonnegative routing matrix.  Entry (i, j) is the fraction of
/// departures from queue i that join queue j; row deficits exit the network.
class RoutingMatrix {
 public:
  explicit RoutingMatrix(int n) : n_(n), r_(static_cast<std::size_t>(n) * n, 0.0) {}

  static RoutingMatrix zero(int n) { return RoutingMatrix(n); }

  [[nodiscard]] int size() const { return n_; }

  [[nodiscard]] Real operator()(int i, int j) const {
    return r_[static_cast<std::size_t>(i) * n_ + j];
  }

  void set(int i, int j, Real value) { r_[static_cast<std::size_t>(i) * n_ + j] = value; }

  [[nodiscard]] Real row_sum(int i) const {
    Real s = 0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j);
    return s;
  }

  /// Spectral radius estimate by power iteration.  Iterates (I + R) to avoid
  /// stalling on cyclic support, then removes the shift.
  [[nodiscard]] Real spectral_radius(int iterations = 200, Real tol = 1e-12) const {
    if (n_ == 0) return 0.0;
    std::vector<Real> v(static_cast<std::size_t>(n_), 1.0);
    Real estimate = 0.0;
    for (int it = 0; it < iterations; ++it) {
      std::vector<Real> w(static_cast<std::size_t>(n_), 0.0);
      for (int i = 0; i < n_; ++i) {
        Real acc = v[static_cast<std::size_t>(i)];
        for (int j = 0; j < n_; ++j) acc += (*this)(i, j) * v[static_cast<std::size_t>(j)];
        w[static_cast<std::size_t>(i)] = acc;
      }
      Real norm = 0;
      for (Real x : w) norm = std::max(norm, std::abs(x));
      if (norm == 0.0) return 0.0;
      for (Real& x : w) x /= norm;
      const Real next = norm - 1.0;
      if (it > 0 && std::abs(next - estimate) <= tol) return std::max(0.0, next);
      estimate = next;
      v = std::move(w);
    }
    return std::max(0.0, estimate);
  }

  bool operator==(const RoutingMatrix&) const = default;

 private:
  int n_;
  std::vector<Real> r_;
};

/// Result of analyzing the support graph of a routing matrix.  When acyclic,
/// `max_visits` is the largest number of queues any vehicle can visit.
struct RoutingDepth {
  bool acyclic = true;
  int max_visits = 1;
};

inline RoutingDepth routing_depth(const RoutingMatrix& r) {
  const int n = r.size();
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (r(i, j) > 0) {
        succ[static_cast<std::size_t>(i)].push_back(j);
        ++indegree[static_cast<std::size_t>(j)];
      }
    }
  }
  // Kahn topological order with a longest-path count.
  std::vector<int> order;
  std::vector<int> visits(static_cast<std::size_t>(n), 1);
  for (int i = 0; i < n; ++i)
    if (indegree[static_cast<std::size_t>(i)] == 0) order.push_back(i);
  int processed = 0;
  int depth = n > 0 ? 1 : 0;
  while (processed < static_cast<int>(order.size())) {
    const int i = order[static_cast<std::size_t>(processed++)];
    depth = std::max(depth, visits[static_cast<std::size_t>(i)]);
    for (int j : succ[static_cast<std::size_t>(i)]) {
      visits[static_cast<std::size_t>(j)] =
          std::max(visits[static_cast<std::size_t>(j)], visits[static_cast<std::size_t>(i)] + 1);
      if (--indegree[static_cast<std::size_t>(j)] == 0) order.push_back(j);
    }
  }
  if (processed < n) return {false, 0};
  return {true, depth};
}

}  // namespace ftsim
