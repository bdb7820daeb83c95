#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gloss/sim/policies.hpp"
#include "gloss/sim/simulator.hpp"
#include "gloss/sim/topology.hpp"

namespace {

gloss::sim::TopologySpec grid(int side) {
  nlohmann::json nodes = nlohmann::json::array(), links = nlohmann::json::array();
  auto name = [](int r, int c) { return "n" + std::to_string(r) + "_" + std::to_string(c); };
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      nodes.push_back({{"id", name(r, c)}, {"role", "HUB"}});
      const nlohmann::json latency = {{"uniform", {5, 20}}};
      if (c + 1 < side) links.push_back({{"a", name(r, c)}, {"b", name(r, c + 1)}, {"kind", "IP"}, {"latency", latency}, {"loss", 0.05}});
      if (r + 1 < side) links.push_back({{"a", name(r, c)}, {"b", name(r + 1, c)}, {"kind", "IP"}, {"latency", latency}, {"loss", 0.05}});
    }
  }
  return gloss::sim::parse_topology(nlohmann::json{{"nodes", nodes}, {"links", links}}.dump());
}

void BM_FloodGrid(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto spec = grid(side);
  std::vector<gloss::sim::SimMessage> workload;
  for (int i = 0; i < 100; ++i) {
    workload.push_back({"m" + std::to_string(i), "n0_0", "n" + std::to_string(side - 1) + "_" + std::to_string(side - 1),
                        "location_event", 120, i * 10});
  }
  const gloss::sim::FloodPolicy flood(2 * side);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gloss::sim::run_simulation(spec, workload, flood, {42}).metrics.transmissions);
  }
}
BENCHMARK(BM_FloodGrid)->Arg(4)->Arg(8);

}  // namespace
