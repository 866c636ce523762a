#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "ftsim/common.hpp"
#include "ftsim/rate_profile.hpp"
#include "ftsim/routing.hpp"

namespace ftsim {

/// Directed link: a fraction `ratio` of departures from `from` joins `to`
/// after travel time `delay`.
struct Link {
  int from = 0;
  int to = 0;
  Real ratio = 0;
  Real delay = 0;
  bool operator==(const Link&) const = default;
};

/// A network of fluid queues under fixed-time control: per-queue periodic
/// entry and service profiles sharing one period, plus delayed routed links.
class Network {
 public:
  Network(Real period, std::vector<RateProfile> entry, std::vector<RateProfile> service,
          std::vector<Link> links)
      : period_(period),
        entry_(std::move(entry)),
        service_(std::move(service)),
        links_(std::move(links)),
        routing_(static_cast<int>(entry_.size())) {
    const int n = queue_count();
    out_links_.assign(static_cast<std::size_t>(n), {});
    in_links_.assign(static_cast<std::size_t>(n), {});
    for (std::size_t k = 0; k < links_.size(); ++k) {
      const auto& l = links_[k];
      if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n) continue;
      routing_.set(l.from, l.to, routing_(l.from, l.to) + l.ratio);
      out_links_[static_cast<std::size_t>(l.from)].push_back(static_cast<int>(k));
      in_links_[static_cast<std::size_t>(l.to)].push_back(static_cast<int>(k));
      min_delay_ = std::min(min_delay_, l.delay);
      max_delay_ = std::max(max_delay_, l.delay);
    }
    if (links_.empty()) {
      min_delay_ = 0;
      max_delay_ = 0;
    }
  }

  [[nodiscard]] int queue_count() const { return static_cast<int>(entry_.size()); }
  [[nodiscard]] Real period() const { return period_; }
  [[nodiscard]] const RateProfile& entry(int i) const { return entry_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] const RateProfile& service(int i) const {
    return service_[static_cast<std::size_t>(i)];
  }
  [[nodiscard]] const std::vector<Link>& links() const { return links_; }
  [[nodiscard]] const RoutingMatrix& routing() const { return routing_; }
  [[nodiscard]] const std::vector<int>& links_out_of(int i) const {
    return out_links_[static_cast<std::size_t>(i)];
  }
  [[nodiscard]] const std::vector<int>& links_into(int i) const {
    return in_links_[static_cast<std::size_t>(i)];
  }
  [[nodiscard]] Real min_delay() const { return min_delay_; }
  [[nodiscard]] Real max_delay() const { return max_delay_; }

  /// Copy of the network with queue i's service profile replaced.
  [[nodiscard]] Network with_service(int i, RateProfile profile) const {
    Network out = *this;
    out.service_[static_cast<std::size_t>(i)] = std::move(profile);
    return out;
  }

 private:
  Real period_;
  std::vector<RateProfile> entry_;
  std::vector<RateProfile> service_;
  std::vector<Link> links_;
  RoutingMatrix routing_;
  std::vector<std::vector<int>> out_links_;
  std::vector<std::vector<int>> in_links_;
  Real min_delay_ = kInf;
  Real max_delay_ = 0;
};

struct ValidationReport {
  std::vector<std::string> violations;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Report-style structural validation: period mismatches, malformed profiles,
/// routing mass, and missing or nonpositive link delays.
inline ValidationReport validate(const Network& net) {
  ValidationReport report;
  auto add = [&report](const std::string& msg) { report.violations.push_back(msg); };

  const int n = net.queue_count();
  if (n == 0) add("network has no queues");
  if (!(net.period() > 0) || !is_finite(net.period())) add("period must be positive and finite");

  for (int i = 0; i < n; ++i) {
    const std::string tag = "queue " + std::to_string(i) + ": ";
    for (const auto& v : net.entry(i).violations()) add(tag + "entry profile: " + v);
    for (const auto& v : net.service(i).violations()) add(tag + "service profile: " + v);
    if (net.entry(i).period() != net.period()) add(tag + "entry profile period mismatch");
    if (net.service(i).period() != net.period()) add(tag + "service profile period mismatch");
  }

  for (const auto& l : net.links()) {
    const std::string tag =
        "link " + std::to_string(l.from) + "->" + std::to_string(l.to) + ": ";
    if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n) {
      add(tag + "endpoint out of range");
      continue;
    }
    if (!is_finite(l.ratio) || l.ratio < 0) add(tag + "ratio must be nonnegative and finite");
    if (l.ratio > 0 && (!is_finite(l.delay) || l.delay <= 0))
      add(tag + "missing delay: links with positive ratio need a positive finite delay");
  }

  for (int i = 0; i < n; ++i) {
    if (net.routing().row_sum(i) > 1.0 + kTol)
      add("queue " + std::to_string(i) + ": routing row sum exceeds 1");
  }
  return report;
}

/// Time-average of a periodic rate profile.
[[nodiscard]] inline Real mean_rate(const RateProfile& profile) { return profile.mean(); }

}  // namespace ftsim
