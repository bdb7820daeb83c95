#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "gloss/sim/metrics.hpp"
#include "gloss/sim/policies.hpp"
#include "gloss/sim/topology.hpp"

namespace gloss::sim {

enum class SimEventKind { inject, arrive, drop };
std::string_view to_string(SimEventKind kind) noexcept;

struct TraceEntry {
  std::int64_t time_ms;
  std::uint64_t seq;
  SimEventKind kind;
  std::size_t node;
  std::size_t message;
};

struct SimOptions {
  std::uint64_t seed = 0;
  std::int64_t horizon_ms = std::numeric_limits<std::int64_t>::max();
  bool record_trace = false;
};

struct SimResult {
  SimMetrics metrics;
  std::vector<TraceEntry> trace;
};

/// Single-threaded discrete-event run. Events are processed in (time, seq)
/// order up to and including the horizon. Throws ValidationFailure or
/// MissingPositions before any event is processed.
SimResult run_simulation(const TopologySpec& spec, const std::vector<SimMessage>& workload,
                         const RoutingPolicy& policy, const SimOptions& options = {});

}  // namespace gloss::sim
