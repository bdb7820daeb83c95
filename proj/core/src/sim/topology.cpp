#include "gloss/sim/topology.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "gloss/error.hpp"

namespace gloss::sim {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseFailure, fmt::format("{}: {}", what, e.what()));
  }
}

[[noreturn]] void invalid(const std::string& msg) { throw Error(Errc::ValidationFailure, msg); }

NodeRole parse_role(const std::string& s) {
  if (s == "MOBILE") return NodeRole::mobile;
  if (s == "SERVER") return NodeRole::server;
  if (s == "HUB") return NodeRole::hub;
  invalid("unknown node role '" + s + "'");
}

TransportKind parse_kind(const std::string& s) {
  if (s == "IP") return TransportKind::ip;
  if (s == "SMS") return TransportKind::sms;
  if (s == "BLUETOOTH") return TransportKind::bluetooth;
  if (s == "PROXIMITY") return TransportKind::proximity;
  invalid("unknown transport kind '" + s + "'");
}

TransportModel parse_transport(const json& l) {
  TransportModel t;
  t.kind = parse_kind(l.at("kind").get<std::string>());
  const json& lat = l.at("latency");
  if (!lat.is_object() || lat.size() != 1) invalid("latency must be {\"fixed\": f} or {\"uniform\": [lo, hi]}");
  if (lat.contains("fixed")) {
    t.latency_lo_ms = t.latency_hi_ms = lat.at("fixed").get<double>();
  } else if (lat.contains("uniform")) {
    const auto range = lat.at("uniform").get<std::vector<double>>();
    if (range.size() != 2) invalid("uniform latency needs [lo, hi]");
    t.latency_lo_ms = range[0];
    t.latency_hi_ms = range[1];
    t.uniform = true;
  } else {
    invalid("latency must be {\"fixed\": f} or {\"uniform\": [lo, hi]}");
  }
  if (!std::isfinite(t.latency_lo_ms) || !std::isfinite(t.latency_hi_ms) || t.latency_lo_ms < 0) {
    invalid("latency must be finite and non-negative");
  }
  if (t.latency_lo_ms > t.latency_hi_ms) invalid("uniform latency needs lo <= hi");
  t.loss = l.value("loss", 0.0);
  if (!(t.loss >= 0.0 && t.loss <= 1.0)) invalid(fmt::format("loss {} outside [0, 1]", t.loss));
  if (l.contains("max_payload") && !l.at("max_payload").is_null()) {
    t.max_payload = l.at("max_payload").get<std::int64_t>();
    if (*t.max_payload < 0) invalid("max_payload must be non-negative");
  }
  return t;
}

}  // namespace

std::string_view to_string(NodeRole role) noexcept {
  switch (role) {
    case NodeRole::mobile: return "MOBILE";
    case NodeRole::server: return "SERVER";
    case NodeRole::hub: return "HUB";
  }
  return "?";
}

std::string_view to_string(TransportKind kind) noexcept {
  switch (kind) {
    case TransportKind::ip: return "IP";
    case TransportKind::sms: return "SMS";
    case TransportKind::bluetooth: return "BLUETOOTH";
    case TransportKind::proximity: return "PROXIMITY";
  }
  return "?";
}

TopologySpec::TopologySpec(std::vector<SimNode> nodes, std::vector<SimLink> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id.empty()) invalid("node id must not be empty");
    if (nodes_[i].proc_delay_ms < 0) invalid("node '" + nodes_[i].id + "': proc_delay_ms must be non-negative");
    if (!index_.emplace(nodes_[i].id, i).second) invalid("duplicate node id '" + nodes_[i].id + "'");
  }
  adjacency_.resize(nodes_.size());
  std::set<std::string> link_ids;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    const auto a = index_of(l.a), b = index_of(l.b);
    if (!a) invalid("link '" + l.id + "' references unknown node '" + l.a + "'");
    if (!b) invalid("link '" + l.id + "' references unknown node '" + l.b + "'");
    if (*a == *b) invalid("link '" + l.id + "' is a self-link on '" + l.a + "'");
    if (!link_ids.insert(l.id).second) invalid("duplicate link id '" + l.id + "'");
    if (!(l.transport.loss >= 0.0 && l.transport.loss <= 1.0)) invalid("link '" + l.id + "': loss outside [0, 1]");
    if (l.transport.latency_lo_ms < 0 || l.transport.latency_lo_ms > l.transport.latency_hi_ms) {
      invalid("link '" + l.id + "': bad latency bounds");
    }
    adjacency_[*a].push_back({i, *b});
    adjacency_[*b].push_back({i, *a});
  }
}

std::optional<std::size_t> TopologySpec::index_of(std::string_view node_id) const {
  const auto it = index_.find(node_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool TopologySpec::all_positioned() const noexcept {
  for (const auto& n : nodes_) {
    if (!n.position) return false;
  }
  return true;
}

TopologySpec parse_topology(std::string_view text) {
  const json doc = parse_json(text, "topology");
  std::vector<SimNode> nodes;
  std::vector<SimLink> links;
  try {
    for (const auto& n : doc.at("nodes")) {
      SimNode node;
      node.id = n.at("id").get<std::string>();
      node.role = parse_role(n.value("role", std::string("HUB")));
      const bool has_lat = n.contains("lat"), has_lon = n.contains("lon");
      if (has_lat != has_lon) invalid("node '" + node.id + "' needs both lat and lon or neither");
      if (has_lat) {
        try {
          node.position = LatLongCoordinate(n.at("lat").get<double>(), n.at("lon").get<double>());
        } catch (const Error& e) {
          invalid("node '" + node.id + "': " + e.what());
        }
      }
      node.proc_delay_ms = n.value("proc_delay_ms", std::int64_t{0});
      nodes.push_back(std::move(node));
    }
    std::map<std::pair<std::string, std::string>, int> parallel;
    for (const auto& l : doc.at("links")) {
      SimLink link;
      link.a = l.at("a").get<std::string>();
      link.b = l.at("b").get<std::string>();
      if (l.contains("id")) {
        link.id = l.at("id").get<std::string>();
      } else {
        const int k = parallel[std::minmax(link.a, link.b)]++;
        link.id = k == 0 ? link.a + "-" + link.b : fmt::format("{}-{}#{}", link.a, link.b, k);
      }
      link.transport = parse_transport(l);
      links.push_back(std::move(link));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ParseFailure, fmt::format("topology: {}", e.what()));
  }
  return TopologySpec(std::move(nodes), std::move(links));
}

TopologySpec load_topology(const std::filesystem::path& path) { return parse_topology(read_file(path)); }

std::string dump_topology(const TopologySpec& spec) {
  json nodes = json::array(), links = json::array();
  for (const auto& n : spec.nodes()) {
    json j{{"id", n.id}, {"role", to_string(n.role)}, {"proc_delay_ms", n.proc_delay_ms}};
    if (n.position) {
      j["lat"] = n.position->lat();
      j["lon"] = n.position->lon();
    }
    nodes.push_back(std::move(j));
  }
  for (const auto& l : spec.links()) {
    const auto& t = l.transport;
    json j{{"id", l.id}, {"a", l.a}, {"b", l.b}, {"kind", to_string(t.kind)}, {"loss", t.loss}};
    j["latency"] = t.uniform ? json{{"uniform", {t.latency_lo_ms, t.latency_hi_ms}}} : json{{"fixed", t.latency_lo_ms}};
    if (t.max_payload) j["max_payload"] = *t.max_payload;
    links.push_back(std::move(j));
  }
  return json{{"nodes", nodes}, {"links", links}}.dump();
}

std::vector<SimMessage> parse_workload(std::string_view text) {
  const json doc = parse_json(text, "workload");
  std::vector<SimMessage> out;
  try {
    if (!doc.is_array()) throw Error(Errc::ParseFailure, "workload: expected a JSON array");
    for (const auto& m : doc) {
      SimMessage msg;
      msg.msg_id = m.at("msg_id").get<std::string>();
      msg.origin = m.at("origin").get<std::string>();
      auto dest = m.at("destination").get<std::string>();
      if (dest != "BROADCAST") msg.destination = std::move(dest);
      msg.msg_type = m.value("type", msg.msg_type);
      msg.size = m.value("size", std::int64_t{0});
      msg.inject_ms = m.value("inject_ms", std::int64_t{0});
      out.push_back(std::move(msg));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ParseFailure, fmt::format("workload: {}", e.what()));
  }
  return out;
}

std::vector<SimMessage> load_workload(const std::filesystem::path& path) { return parse_workload(read_file(path)); }

std::string dump_workload(const std::vector<SimMessage>& workload) {
  json out = json::array();
  for (const auto& m : workload) {
    out.push_back({{"msg_id", m.msg_id},
                   {"origin", m.origin},
                   {"destination", m.destination.value_or("BROADCAST")},
                   {"type", m.msg_type},
                   {"size", m.size},
                   {"inject_ms", m.inject_ms}});
  }
  return out.dump();
}

void validate_workload(const TopologySpec& spec, const std::vector<SimMessage>& workload) {
  std::set<std::string> ids;
  for (const auto& m : workload) {
    if (!ids.insert(m.msg_id).second) invalid("duplicate msg_id '" + m.msg_id + "'");
    if (!spec.index_of(m.origin)) invalid("message '" + m.msg_id + "': unknown origin '" + m.origin + "'");
    if (m.destination) {
      if (!spec.index_of(*m.destination)) {
        invalid("message '" + m.msg_id + "': unknown destination '" + *m.destination + "'");
      }
      if (*m.destination == m.origin) invalid("message '" + m.msg_id + "': origin equals destination");
    }
    if (m.size < 0) invalid("message '" + m.msg_id + "': size must be non-negative");
    if (m.inject_ms < 0) invalid("message '" + m.msg_id + "': inject_ms must be non-negative");
  }
}

}  // namespace gloss::sim
