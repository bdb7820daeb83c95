#include "gloss/sim/metrics.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "gloss/error.hpp"

namespace gloss::sim {

using nlohmann::ordered_json;

std::string metrics_to_json(const SimMetrics& m) {
  ordered_json deliveries = ordered_json::array();
  for (const auto& d : m.deliveries) {
    deliveries.push_back({{"msg_id", d.msg_id}, {"node", d.node}, {"latency_ms", d.latency_ms}, {"hops", d.hops}});
  }
  ordered_json j{{"injected", m.injected},
                 {"unicast_injected", m.unicast_injected},
                 {"transmissions", m.transmissions},
                 {"arrivals", m.arrivals},
                 {"delivered", m.delivered},
                 {"unicast_delivered", m.unicast_delivered},
                 {"dropped_loss", m.dropped_loss},
                 {"dropped_oversize", m.dropped_oversize},
                 {"dropped_dead_end", m.dropped_dead_end},
                 {"duplicates_suppressed", m.duplicates_suppressed},
                 {"in_flight_at_horizon", m.in_flight_at_horizon},
                 {"delivery_ratio", m.delivery_ratio},
                 {"deliveries", deliveries}};
  return j.dump();
}

SimMetrics metrics_from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    SimMetrics m;
    m.injected = j.at("injected").get<std::uint64_t>();
    m.unicast_injected = j.at("unicast_injected").get<std::uint64_t>();
    m.transmissions = j.at("transmissions").get<std::uint64_t>();
    m.arrivals = j.at("arrivals").get<std::uint64_t>();
    m.delivered = j.at("delivered").get<std::uint64_t>();
    m.unicast_delivered = j.at("unicast_delivered").get<std::uint64_t>();
    m.dropped_loss = j.at("dropped_loss").get<std::uint64_t>();
    m.dropped_oversize = j.at("dropped_oversize").get<std::uint64_t>();
    m.dropped_dead_end = j.at("dropped_dead_end").get<std::uint64_t>();
    m.duplicates_suppressed = j.at("duplicates_suppressed").get<std::uint64_t>();
    m.in_flight_at_horizon = j.at("in_flight_at_horizon").get<std::uint64_t>();
    m.delivery_ratio = j.at("delivery_ratio").get<double>();
    for (const auto& d : j.at("deliveries")) {
      m.deliveries.push_back({d.at("msg_id").get<std::string>(), d.at("node").get<std::string>(),
                              d.at("latency_ms").get<std::int64_t>(), d.at("hops").get<int>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseFailure, fmt::format("metrics: {}", e.what()));
  }
}

std::string metrics_to_csv(const SimMetrics& m) {
  std::string out = "msg_id,latency_ms,hops\n";
  for (const auto& d : m.deliveries) out += fmt::format("{},{},{}\n", d.msg_id, d.latency_ms, d.hops);
  out += fmt::format(
      "summary,injected={},transmissions={},delivered={},dropped_loss={},dropped_oversize={},dropped_dead_end={},"
      "duplicates_suppressed={},in_flight_at_horizon={},delivery_ratio={}\n",
      m.injected, m.transmissions, m.delivered, m.dropped_loss, m.dropped_oversize, m.dropped_dead_end,
      m.duplicates_suppressed, m.in_flight_at_horizon, m.delivery_ratio);
  return out;
}

}  // namespace gloss::sim
