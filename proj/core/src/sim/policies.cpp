#include "gloss/sim/policies.hpp"

#include <tuple>

#include "gloss/error.hpp"
#include "gloss/services/geodesy.hpp"

namespace gloss::sim {

void RoutingPolicy::check(const TopologySpec&, const std::vector<SimMessage>&) const {}

FloodPolicy::FloodPolicy(int ttl) : ttl_(ttl) {
  if (ttl < 1) throw Error(Errc::InvalidParam, "flood ttl must be >= 1");
}

RouteDecision FloodPolicy::route(const TopologySpec& spec, const Receipt& r) const {
  RouteDecision d;
  if (r.hops >= ttl_) return d;
  for (const auto& n : spec.neighbors(r.node)) {
    if (n.link != r.arrival_link) d.links.push_back(n.link);
  }
  return d;
}

void GeoGreedyPolicy::check(const TopologySpec& spec, const std::vector<SimMessage>& workload) const {
  for (const auto& n : spec.nodes()) {
    if (!n.position) throw Error(Errc::MissingPositions, "geo routing needs a position for node '" + n.id + "'");
  }
  for (const auto& m : workload) {
    if (m.broadcast()) {
      throw Error(Errc::ValidationFailure, "geo routing cannot carry BROADCAST message '" + m.msg_id + "'");
    }
  }
}

RouteDecision GeoGreedyPolicy::route(const TopologySpec& spec, const Receipt& r) const {
  RouteDecision d;
  if (!r.destination || r.node == *r.destination) return d;
  const auto& target = *spec.nodes()[*r.destination].position;
  const double here = services::haversine(*spec.nodes()[r.node].position, target);
  std::optional<std::tuple<double, std::string_view, std::size_t>> best;
  for (const auto& n : spec.neighbors(r.node)) {
    const auto& node = spec.nodes()[n.node];
    const double dist = services::haversine(*node.position, target);
    if (dist >= here) continue;
    std::tuple<double, std::string_view, std::size_t> key{dist, node.id, n.link};
    if (!best || key < *best) best = key;
  }
  if (best) {
    d.links.push_back(std::get<2>(*best));
  } else {
    d.dead_end = true;
  }
  return d;
}

std::unique_ptr<RoutingPolicy> make_policy(std::string_view name, int ttl) {
  if (name == "flood") return std::make_unique<FloodPolicy>(ttl);
  if (name == "geo" || name == "geo_greedy") return std::make_unique<GeoGreedyPolicy>();
  throw Error(Errc::InvalidParam, "unknown policy '" + std::string(name) + "' (expected flood or geo)");
}

}  // namespace gloss::sim
