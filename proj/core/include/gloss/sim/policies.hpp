#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "gloss/sim/topology.hpp"

namespace gloss::sim {

/// A node holding a message for the first time. `arrival_link` is empty at
/// the origin; `hops` counts the transmissions the copy has taken.
struct Receipt {
  std::size_t node;
  const SimMessage* message;
  std::optional<std::size_t> destination;
  std::optional<std::size_t> arrival_link;
  int hops;
};

struct RouteDecision {
  std::vector<std::size_t> links;
  bool dead_end = false;
};

class RoutingPolicy {
 public:
  virtual ~RoutingPolicy() = default;

  virtual std::string_view name() const noexcept = 0;
  /// Rejects topologies or workloads the policy cannot route.
  virtual void check(const TopologySpec& spec, const std::vector<SimMessage>& workload) const;
  /// Links to transmit on after a first receipt (including at the origin).
  virtual RouteDecision route(const TopologySpec& spec, const Receipt& receipt) const = 0;
};

/// Re-sends on every link except the arrival link while hops < ttl. The
/// destination keeps forwarding like any other node.
class FloodPolicy final : public RoutingPolicy {
 public:
  /// Throws InvalidParam unless ttl >= 1.
  explicit FloodPolicy(int ttl);

  int ttl() const noexcept { return ttl_; }
  std::string_view name() const noexcept override { return "flood"; }
  RouteDecision route(const TopologySpec& spec, const Receipt& receipt) const override;

 private:
  int ttl_;
};

/// Forwards to the neighbor strictly closest to the destination among those
/// strictly closer than the current node; dead-ends otherwise.
class GeoGreedyPolicy final : public RoutingPolicy {
 public:
  std::string_view name() const noexcept override { return "geo"; }
  /// MissingPositions when any node lacks a position; ValidationFailure for BROADCAST.
  void check(const TopologySpec& spec, const std::vector<SimMessage>& workload) const override;
  RouteDecision route(const TopologySpec& spec, const Receipt& receipt) const override;
};

/// "flood" or "geo" (alias "geo_greedy"); throws InvalidParam otherwise.
std::unique_ptr<RoutingPolicy> make_policy(std::string_view name, int ttl);

}  // namespace gloss::sim
