#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gloss::sim {

struct Delivery {
  std::string msg_id;
  std::string node;
  std::int64_t latency_ms = 0;
  int hops = 0;

  friend bool operator==(const Delivery&, const Delivery&) = default;
};

struct SimMetrics {
  std::uint64_t injected = 0;
  std::uint64_t unicast_injected = 0;
  std::uint64_t transmissions = 0;
  std::uint64_t arrivals = 0;
  /// First receipts at the destination, or at any non-origin node for BROADCAST.
  std::uint64_t delivered = 0;
  std::uint64_t unicast_delivered = 0;
  std::uint64_t dropped_loss = 0;
  std::uint64_t dropped_oversize = 0;
  std::uint64_t dropped_dead_end = 0;
  std::uint64_t duplicates_suppressed = 0;
  /// Transmissions still travelling when the horizon cut the run.
  std::uint64_t in_flight_at_horizon = 0;
  /// unicast_delivered / unicast_injected, 0 when nothing was addressed.
  double delivery_ratio = 0;
  std::vector<Delivery> deliveries;

  friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

std::string metrics_to_json(const SimMetrics& m);
/// Throws ParseFailure.
SimMetrics metrics_from_json(std::string_view json);
/// Header, one "msg_id,latency_ms,hops" row per delivery, then a summary row.
std::string metrics_to_csv(const SimMetrics& m);

}  // namespace gloss::sim
