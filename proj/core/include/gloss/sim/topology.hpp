#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gloss/transport/types.hpp"

namespace gloss::sim {

enum class NodeRole { mobile, server, hub };
enum class TransportKind { ip, sms, bluetooth, proximity };

std::string_view to_string(NodeRole role) noexcept;
std::string_view to_string(TransportKind kind) noexcept;

struct TransportModel {
  TransportKind kind = TransportKind::ip;
  /// Latency bounds in ms; fixed latency has lo == hi and uniform == false.
  double latency_lo_ms = 0;
  double latency_hi_ms = 0;
  bool uniform = false;
  double loss = 0;
  std::optional<std::int64_t> max_payload;
};

struct SimNode {
  std::string id;
  NodeRole role = NodeRole::hub;
  std::optional<LatLongCoordinate> position;
  std::int64_t proc_delay_ms = 0;
};

/// Bidirectional. `id` seeds the link's random substream.
struct SimLink {
  std::string id;
  std::string a;
  std::string b;
  TransportModel transport;
};

struct Neighbor {
  std::size_t link;
  std::size_t node;
};

class TopologySpec {
 public:
  TopologySpec() = default;
  /// Validates; throws ValidationFailure.
  TopologySpec(std::vector<SimNode> nodes, std::vector<SimLink> links);

  const std::vector<SimNode>& nodes() const noexcept { return nodes_; }
  const std::vector<SimLink>& links() const noexcept { return links_; }
  std::optional<std::size_t> index_of(std::string_view node_id) const;
  /// Links touching the node, in link order.
  const std::vector<Neighbor>& neighbors(std::size_t node) const { return adjacency_.at(node); }
  bool all_positioned() const noexcept;

 private:
  std::vector<SimNode> nodes_;
  std::vector<SimLink> links_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Throws ParseFailure on malformed JSON or wrong field types and
/// ValidationFailure on semantic errors.
TopologySpec parse_topology(std::string_view json);
TopologySpec load_topology(const std::filesystem::path& path);
std::string dump_topology(const TopologySpec& spec);

struct SimMessage {
  std::string msg_id;
  std::string origin;
  std::optional<std::string> destination;  ///< nullopt is BROADCAST
  std::string msg_type = "location_event";
  std::int64_t size = 0;
  std::int64_t inject_ms = 0;

  bool broadcast() const noexcept { return !destination.has_value(); }
};

std::vector<SimMessage> parse_workload(std::string_view json);
std::vector<SimMessage> load_workload(const std::filesystem::path& path);
std::string dump_workload(const std::vector<SimMessage>& workload);

/// Endpoints exist, ids unique, sizes and times non-negative; throws ValidationFailure.
void validate_workload(const TopologySpec& spec, const std::vector<SimMessage>& workload);

}  // namespace gloss::sim
