#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftsim/blocking.hpp"
#include "ftsim/common.hpp"
#include "ftsim/network.hpp"
#include "ftsim/oracle.hpp"

namespace ftsim {

/// A parsed network configuration: the network itself plus queue names and
/// the optional blocking/oracle sections.
struct NetworkConfig {
  Network network{1.0, {}, {}, {}};
  std::vector<std::string> queue_ids;
  StorageLimits limits{{}};
  DiscreteConfig oracle{};
  bool has_oracle = false;

  [[nodiscard]] int index_of(const std::string& id) const {
    for (std::size_t k = 0; k < queue_ids.size(); ++k)
      if (queue_ids[k] == id) return static_cast<int>(k);
    return -1;
  }
};

namespace detail {

inline RateProfile parse_profile(const nlohmann::ordered_json& j, Real period,
                                 const std::string& what) {
  if (!j.is_array() || j.empty())
    throw ConfigParseError(what + " must be a nonempty array of [start, rate] pairs");
  std::vector<RateProfile::Piece> pieces;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      throw ConfigParseError(what + " entries must be [start, rate] pairs");
    pieces.push_back({pair[0].get<Real>(), pair[1].get<Real>()});
  }
  return RateProfile(period, std::move(pieces));
}

inline nlohmann::ordered_json profile_json(const RateProfile& profile) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& p : profile.pieces()) out.push_back({p.start, p.rate});
  return out;
}

}  // namespace detail

inline NetworkConfig parse_config(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!j.contains("period")) throw ConfigParseError("missing key: period");
    if (!j.contains("queues") || !j["queues"].is_array() || j["queues"].empty())
      throw ConfigParseError("missing or empty key: queues");
    const Real period = j["period"].get<Real>();

    NetworkConfig config;
    std::vector<RateProfile> entry, service;
    for (const auto& q : j["queues"]) {
      if (!q.contains("id")) throw ConfigParseError("queue entries need an id");
      const std::string id = q["id"].get<std::string>();
      if (config.index_of(id) >= 0) throw ConfigParseError("duplicate queue id: " + id);
      config.queue_ids.push_back(id);
      entry.push_back(detail::parse_profile(q.at("entry_profile"), period,
                                            "entry_profile of " + id));
      service.push_back(detail::parse_profile(q.at("service_profile"), period,
                                              "service_profile of " + id));
    }

    std::vector<Link> links;
    if (j.contains("links")) {
      for (const auto& l : j["links"]) {
        const int from = config.index_of(l.at("from").get<std::string>());
        const int to = config.index_of(l.at("to").get<std::string>());
        if (from < 0 || to < 0) throw ConfigParseError("link references an unknown queue id");
        links.push_back({from, to, l.at("ratio").get<Real>(), l.at("delay").get<Real>()});
      }
    }
    config.network = Network(period, std::move(entry), std::move(service), std::move(links));

    config.limits = StorageLimits::unlimited(config.network.queue_count());
    if (j.contains("storage")) {
      for (const auto& [id, cap] : j["storage"].items()) {
        const int i = config.index_of(id);
        if (i < 0) throw ConfigParseError("storage references an unknown queue id: " + id);
        config.limits.capacity[static_cast<std::size_t>(i)] = cap.get<Real>();
      }
    }
    if (j.contains("oracle")) {
      config.has_oracle = true;
      const auto& o = j["oracle"];
      if (o.contains("granularity")) config.oracle.granularity = o["granularity"].get<long>();
      if (o.contains("step")) config.oracle.step = o["step"].get<Real>();
    }
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParseError(std::string("malformed config: ") + e.what());
  }
}

inline NetworkConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

/// Deterministic JSON emission; the result re-parses to an identical network.
inline std::string emit_config(const NetworkConfig& config) {
  nlohmann::ordered_json j;
  j["period"] = config.network.period();
  j["queues"] = nlohmann::ordered_json::array();
  for (int i = 0; i < config.network.queue_count(); ++i) {
    nlohmann::ordered_json q;
    q["id"] = config.queue_ids[static_cast<std::size_t>(i)];
    q["entry_profile"] = detail::profile_json(config.network.entry(i));
    q["service_profile"] = detail::profile_json(config.network.service(i));
    j["queues"].push_back(std::move(q));
  }
  j["links"] = nlohmann::ordered_json::array();
  for (const auto& l : config.network.links()) {
    nlohmann::ordered_json lj;
    lj["from"] = config.queue_ids[static_cast<std::size_t>(l.from)];
    lj["to"] = config.queue_ids[static_cast<std::size_t>(l.to)];
    lj["ratio"] = l.ratio;
    lj["delay"] = l.delay;
    j["links"].push_back(std::move(lj));
  }
  nlohmann::ordered_json storage;
  for (int i = 0; i < config.network.queue_count(); ++i) {
    const Real cap = config.limits.of(i);
    if (is_finite(cap)) storage[config.queue_ids[static_cast<std::size_t>(i)]] = cap;
  }
  if (!storage.empty()) j["storage"] = std::move(storage);
  if (config.has_oracle) {
    j["oracle"] = {{"granularity", config.oracle.granularity}, {"step", config.oracle.step}};
  }
  return j.dump(2) + "\n";
}

}  // namespace ftsim
