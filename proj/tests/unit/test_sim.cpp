#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gloss/error.hpp"
#include "gloss/sim/metrics.hpp"
#include "gloss/sim/policies.hpp"
#include "gloss/sim/rng.hpp"
#include "gloss/sim/simulator.hpp"
#include "gloss/sim/topology.hpp"
#include "test_support.hpp"

using namespace gloss;
using namespace gloss::sim;
using nlohmann::json;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected gloss::Error");
  return Errc::IoFailure;
}

json make_link(const std::string& a, const std::string& b, json latency = {{"fixed", 10}}, double loss = 0) {
  return {{"a", a}, {"b", b}, {"kind", "IP"}, {"latency", latency}, {"loss", loss}};
}

json node(const std::string& id) { return {{"id", id}, {"role", "HUB"}}; }

json node_at(const std::string& id, double lat, double lon) {
  return {{"id", id}, {"role", "HUB"}, {"lat", lat}, {"lon", lon}};
}

TopologySpec topo(const std::vector<json>& nodes, const std::vector<json>& links) {
  return parse_topology(json{{"nodes", nodes}, {"links", links}}.dump());
}

TopologySpec line3() {
  return topo({node_at("A", 56, -3.0), node_at("B", 56, -2.9), node_at("C", 56, -2.8)},
              {make_link("A", "B"), make_link("B", "C")});
}

TopologySpec k3() { return topo({node("A"), node("B"), node("C")}, {make_link("A", "B"), make_link("A", "C"), make_link("B", "C")}); }

SimMessage msg(const std::string& id, const std::string& from, std::optional<std::string> to, std::int64_t t = 0,
               std::int64_t size = 100) {
  return SimMessage{id, from, std::move(to), "location_event", size, t};
}

SimMetrics run(const TopologySpec& spec, const std::vector<SimMessage>& w, const RoutingPolicy& p,
               std::uint64_t seed = 42) {
  return run_simulation(spec, w, p, {seed}).metrics;
}

// Random connected graph on n nodes: a random spanning tree plus extra edges.
TopologySpec random_connected(std::mt19937_64& rng, int n, double loss, bool uniform) {
  std::vector<json> nodes, links;
  std::set<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) nodes.push_back(node("n" + std::to_string(i)));
  for (int i = 1; i < n; ++i) edges.insert({static_cast<int>(rng() % i), i});
  for (int k = 0; k < n; ++k) {
    int a = rng() % n, b = rng() % n;
    if (a != b) edges.insert({std::min(a, b), std::max(a, b)});
  }
  for (auto [a, b] : edges) {
    json latency = uniform ? json{{"uniform", {1, 30}}} : json{{"fixed", 1 + (a * 7 + b) % 13}};
    links.push_back(make_link("n" + std::to_string(a), "n" + std::to_string(b), latency, loss));
  }
  return topo(nodes, links);
}

}  // namespace

// --- loading ---------------------------------------------------------------

TEST_CASE("load_topology fixtures and errors") {
  const auto two = load_topology(testing::fixture("topology_2node.json"));
  CHECK(two.nodes().size() == 2);
  CHECK(two.links().size() == 1);
  CHECK(two.links()[0].id == "A-B");
  CHECK(two.nodes()[0].role == NodeRole::mobile);

  CHECK(code_of([] { topo({node("A")}, {make_link("A", "Z")}); }) == Errc::ValidationFailure);
  CHECK(code_of([] { topo({node("A"), node("B")}, {make_link("A", "B", {{"fixed", 1}}, 1.5)}); }) ==
        Errc::ValidationFailure);
  CHECK(code_of([] { topo({node("A")}, {make_link("A", "A")}); }) == Errc::ValidationFailure);
  CHECK(code_of([] { topo({node("A"), node("A")}, {}); }) == Errc::ValidationFailure);
  CHECK(code_of([] { topo({node("A"), node("B")}, {make_link("A", "B", {{"uniform", {5, 1}}})}); }) ==
        Errc::ValidationFailure);
  CHECK(code_of([] { parse_topology("{nodes"); }) == Errc::ParseFailure);
  CHECK(code_of([] { parse_topology(R"({"nodes": 3, "links": []})"); }) == Errc::ParseFailure);
  CHECK(code_of([] { topo({node("A"), node("B")}, {make_link("A", "B", {{"gaussian", 3}})}); }) == Errc::ValidationFailure);
}

TEST_CASE("parallel links get distinct default ids") {
  const auto t = topo({node("A"), node("B")}, {make_link("A", "B"), make_link("A", "B")});
  CHECK(t.links()[0].id != t.links()[1].id);
}

TEST_CASE("topology and workload dumps round-trip") {
  const auto t = load_topology(testing::fixture("topology_line.json"));
  const auto again = parse_topology(dump_topology(t));
  CHECK(dump_topology(again) == dump_topology(t));
  REQUIRE(again.links()[1].transport.max_payload);
  CHECK(*again.links()[1].transport.max_payload == 160);
  CHECK(again.links()[1].transport.uniform);

  const auto w = load_workload(testing::fixture("workload_line.json"));
  CHECK(dump_workload(parse_workload(dump_workload(w))) == dump_workload(w));
  const auto b = parse_workload(R"([{"msg_id":"m","origin":"A","destination":"BROADCAST"}])");
  CHECK(b[0].broadcast());
}

TEST_CASE("workload validation") {
  const auto t = k3();
  const auto flood = FloodPolicy(4);
  CHECK(code_of([&] { run(t, {msg("m", "A", "Z")}, flood); }) == Errc::ValidationFailure);
  CHECK(code_of([&] { run(t, {msg("m", "A", "B"), msg("m", "B", "C")}, flood); }) == Errc::ValidationFailure);
  CHECK(code_of([&] { run(t, {msg("m", "A", "B", -1)}, flood); }) == Errc::ValidationFailure);
  CHECK(code_of([&] { run(t, {msg("m", "A", "B", 0, -5)}, flood); }) == Errc::ValidationFailure);
  CHECK(code_of([&] { run(t, {msg("m", "A", "A")}, flood); }) == Errc::ValidationFailure);
  CHECK(code_of([&] { run_simulation(t, {msg("m", "A", "B", 100)}, flood, {1, 50}); }) == Errc::ValidationFailure);
  CHECK(code_of([] { FloodPolicy(0); }) == Errc::InvalidParam);
  CHECK(code_of([] { make_policy("dht", 3); }) == Errc::InvalidParam);
  CHECK(make_policy("geo_greedy", 1)->name() == "geo");
}

// --- run examples ----------------------------------------------------------

TEST_CASE("two nodes, one message") {
  const auto m = run(load_topology(testing::fixture("topology_2node.json")),
                     load_workload(testing::fixture("workload_1msg.json")), FloodPolicy(4));
  CHECK(m.transmissions == 1);
  CHECK(m.delivered == 1);
  CHECK(m.delivery_ratio == 1.0);
  REQUIRE(m.deliveries.size() == 1);
  CHECK(m.deliveries[0].latency_ms == 10);
  CHECK(m.deliveries[0].hops == 1);
}

TEST_CASE("flood on a three-node line") {
  const auto m = run(line3(), {msg("m", "A", "C", 5)}, FloodPolicy(4));
  CHECK(m.transmissions == 2);
  REQUIRE(m.deliveries.size() == 1);
  CHECK(m.deliveries[0].latency_ms == 20);
  CHECK(m.deliveries[0].hops == 2);
  CHECK(m.duplicates_suppressed == 0);
}

TEST_CASE("flood on K3 with ttl 2") {
  const auto m = run(k3(), {msg("m", "A", "C")}, FloodPolicy(2));
  CHECK(m.transmissions == 4);
  CHECK(m.duplicates_suppressed == 2);
  CHECK(m.delivered == 1);
  CHECK(m.arrivals == 4);
}

TEST_CASE("ttl 1 cannot cross two hops") {
  const auto m = run(line3(), {msg("m", "A", "C")}, FloodPolicy(1));
  CHECK(m.delivered == 0);
  CHECK(m.delivery_ratio == 0.0);
  CHECK(m.transmissions == 1);
}

TEST_CASE("broadcast counts each receiving node once") {
  const auto m = run(k3(), {msg("m", "A", std::nullopt)}, FloodPolicy(4));
  CHECK(m.delivered == 2);
  CHECK(m.unicast_injected == 0);
  CHECK(m.delivery_ratio == 0.0);
}

TEST_CASE("processing delay is added at each forwarding node") {
  auto t = topo({node("A"), json{{"id", "B"}, {"proc_delay_ms", 7}}, node("C")}, {make_link("A", "B"), make_link("B", "C")});
  const auto m = run(t, {msg("m", "A", "C")}, FloodPolicy(4));
  REQUIRE(m.deliveries.size() == 1);
  CHECK(m.deliveries[0].latency_ms == 27);
}

TEST_CASE("oversize messages are dropped at transmission") {
  const auto t = load_topology(testing::fixture("topology_line.json"));
  const auto small = run(t, {msg("m", "A", "C", 0, 160)}, FloodPolicy(4));
  CHECK(small.delivered == 1);
  CHECK(small.dropped_oversize == 0);
  REQUIRE(small.deliveries.size() == 1);
  CHECK(small.deliveries[0].latency_ms >= 15);
  CHECK(small.deliveries[0].latency_ms <= 25);
  const auto big = run(t, {msg("m", "A", "C", 0, 161)}, FloodPolicy(4));
  CHECK(big.delivered == 0);
  CHECK(big.dropped_oversize == 1);
  CHECK(big.transmissions == 1);
}

TEST_CASE("geo greedy examples") {
  const GeoGreedyPolicy geo;
  const auto m = run(line3(), {msg("m", "A", "C")}, geo);
  REQUIRE(m.deliveries.size() == 1);
  CHECK(m.deliveries[0].hops == 2);
  CHECK(m.transmissions == 2);

  // Direct link is the closest step.
  const auto tri = topo({node_at("A", 56, -3.0), node_at("B", 56.05, -2.9), node_at("C", 56, -2.8)},
                        {make_link("A", "B"), make_link("B", "C"), make_link("A", "C")});
  const auto direct = run(tri, {msg("m", "A", "C")}, geo);
  REQUIRE(direct.deliveries.size() == 1);
  CHECK(direct.deliveries[0].hops == 1);

  // A's only neighbour is farther from C than A is.
  const auto detour = topo({node_at("A", 56, -3.0), node_at("B", 56, -3.1), node_at("C", 56, -2.8)},
                           {make_link("A", "B"), make_link("B", "C")});
  const auto dead = run(detour, {msg("m", "A", "C")}, geo);
  CHECK(dead.dropped_dead_end == 1);
  CHECK(dead.delivered == 0);
  CHECK(dead.transmissions == 0);
}

TEST_CASE("geo greedy requires positions and unicast") {
  const GeoGreedyPolicy geo;
  CHECK(code_of([&] { run(k3(), {msg("m", "A", "C")}, geo); }) == Errc::MissingPositions);
  CHECK(code_of([&] { run(line3(), {msg("m", "A", std::nullopt)}, geo); }) == Errc::ValidationFailure);
}

// --- properties ------------------------------------------------------------

TEST_CASE("determinism: identical inputs give identical metrics") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    const auto t = random_connected(rng, 8, 0.2, true);
    std::vector<SimMessage> w;
    for (int i = 0; i < 20; ++i) {
      const auto a = rng() % 8, b = (a + 1 + rng() % 7) % 8;
      w.push_back(msg("m" + std::to_string(i), "n" + std::to_string(a), "n" + std::to_string(b),
                      static_cast<std::int64_t>(rng() % 100)));
    }
    const FloodPolicy flood(5);
    const auto first = run(t, w, flood, round);
    const auto second = run(t, w, flood, round);
    CHECK(first == second);
    CHECK(metrics_to_json(first) == metrics_to_json(second));
  }
}

TEST_CASE("adding a link leaves other links' draws unchanged") {
  LinkStream a(9, "A-B"), b(9, "A-B"), c(9, "B-C");
  for (int i = 0; i < 100; ++i) {
    const double x = a.next_unit();
    CHECK(x == b.next_unit());
    CHECK(x >= 0);
    CHECK(x < 1);
  }
  CHECK(LinkStream(9, "A-B").next_unit() != c.next_unit());
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("zero-loss flooding with ttl >= diameter delivers everything") {
  std::mt19937_64 rng(6);
  for (int round = 0; round < 30; ++round) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const auto t = random_connected(rng, n, 0, round % 2 == 0);
    std::vector<SimMessage> w;
    for (int i = 0; i < 10; ++i) {
      const auto a = rng() % n, b = (a + 1 + rng() % (n - 1)) % n;
      w.push_back(msg("m" + std::to_string(i), "n" + std::to_string(a), "n" + std::to_string(b)));
    }
    CHECK(run(t, w, FloodPolicy(n), round).delivery_ratio == 1.0);
  }
}

TEST_CASE("conservation and trace order under loss and horizons") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 40; ++round) {
    const auto t = random_connected(rng, 6, 0.25, true);
    std::vector<SimMessage> w;
    for (int i = 0; i < 15; ++i) {
      w.push_back(msg("m" + std::to_string(i), "n" + std::to_string(rng() % 6), std::nullopt,
                      static_cast<std::int64_t>(rng() % 40)));
    }
    const std::int64_t horizon = round % 2 ? 60 : std::numeric_limits<std::int64_t>::max();
    const auto r = run_simulation(t, w, FloodPolicy(4), {static_cast<std::uint64_t>(round), horizon, true});
    const auto& m = r.metrics;
    CHECK(m.transmissions == m.arrivals + m.dropped_loss + m.in_flight_at_horizon);
    CHECK(m.delivered + m.duplicates_suppressed <= m.arrivals);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      const auto& a = r.trace[i - 1];
      const auto& b = r.trace[i];
      CHECK((a.time_ms < b.time_ms || (a.time_ms == b.time_ms && a.seq < b.seq)));
    }
    for (const auto& e : r.trace) CHECK(e.time_ms <= horizon);
    if (horizon == std::numeric_limits<std::int64_t>::max()) CHECK(m.in_flight_at_horizon == 0);
  }
}

TEST_CASE("loss calibration on a single hop") {
  for (double p : {0.1, 0.3, 0.5}) {
    CAPTURE(p);
    const auto t = topo({node("A"), node("B")}, {make_link("A", "B", {{"fixed", 10}}, p)});
    std::vector<SimMessage> w;
    for (int i = 0; i < 10000; ++i) w.push_back(msg("m" + std::to_string(i), "A", "B", i));
    const auto m = run(t, w, FloodPolicy(1), 1234);
    CHECK(std::abs(m.delivery_ratio - (1 - p)) <= 0.02);
    CHECK(m.dropped_loss + m.delivered == 10000);
  }
}

// --- metrics ---------------------------------------------------------------

TEST_CASE("metrics JSON round-trip") {
  const auto m = run(k3(), {msg("a", "A", "C"), msg("b", "B", std::nullopt, 3)}, FloodPolicy(3));
  CHECK(metrics_from_json(metrics_to_json(m)) == m);
  CHECK(metrics_from_json(metrics_to_json(SimMetrics{})) == SimMetrics{});
  CHECK(code_of([] { metrics_from_json("[]"); }) == Errc::ParseFailure);
  const auto j = json::parse(metrics_to_json(m));
  for (auto key : {"transmissions", "delivered", "dropped_loss", "dropped_oversize", "dropped_dead_end",
                   "duplicates_suppressed", "delivery_ratio", "deliveries"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("metrics CSV") {
  const auto empty = metrics_to_csv(SimMetrics{});
  CHECK(empty ==
        "msg_id,latency_ms,hops\n"
        "summary,injected=0,transmissions=0,delivered=0,dropped_loss=0,dropped_oversize=0,dropped_dead_end=0,"
        "duplicates_suppressed=0,in_flight_at_horizon=0,delivery_ratio=0\n");
  const auto m = run(load_topology(testing::fixture("topology_2node.json")),
                     load_workload(testing::fixture("workload_1msg.json")), FloodPolicy(4));
  const auto csv = metrics_to_csv(m);
  CHECK(csv.find("\nmsg-1,10,1\n") != std::string::npos);
  CHECK(csv.find("delivery_ratio=1\n") != std::string::npos);
}
