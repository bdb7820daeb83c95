// Acceptance suite A1-A10. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "gloss/catalog/catalog.hpp"
#include "gloss/control/server.hpp"
#include "gloss/error.hpp"
#include "gloss/pipeline/assembly.hpp"
#include "gloss/pipeline/components.hpp"
#include "gloss/services/geodesy.hpp"
#include "gloss/services/location_services.hpp"
#include "gloss/sim/metrics.hpp"
#include "gloss/sim/policies.hpp"
#include "gloss/sim/simulator.hpp"
#include "gloss/sim/topology.hpp"
#include "gloss/store/ontology_store.hpp"
#include "gloss/store/watcher.hpp"
#include "gloss/transport/assemblies.hpp"
#include "gloss/transport/file_sink.hpp"
#include "gloss/transport/gateway.hpp"
#include "gloss/transport/gps.hpp"
#include "gloss/transport/sms.hpp"
#include "gloss/transport/sms_device.hpp"
#include "gloss/transport/xml_codec.hpp"
#include "test_support.hpp"

using namespace gloss;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

LocationEvent at(const UserId& user, LatLongCoordinate p, long long ms) {
  return make_location_event(user, p, Timestamp(std::chrono::milliseconds(ms)));
}

LatLongCoordinate near(std::mt19937_64& rng, double lat0, double lon0, double spread) {
  std::uniform_real_distribution<double> d(-spread, spread);
  return {lat0 + d(rng), lon0 + d(rng)};
}

// --- A1 --------------------------------------------------------------------

std::string a1() {
  testing::TempDir dir;
  store::OntologyStore store(dir.path());
  store::Watcher watcher(store, store.inbox_dir(), std::chrono::milliseconds(20));
  watcher.start();

  const auto trace = transport::load_gps_trace(testing::fixture("trace_10.jsonl"));
  expect(trace.size() == 10, "fixture trace should hold 10 fixes");
  const UserId user("+447700900123");
  auto gateway = std::make_shared<transport::LoopbackGateway>();
  auto server = transport::build_server_assembly({gateway, store.inbox_dir()});
  server->start();
  auto mobile = transport::build_mobile_assembly({trace, std::chrono::milliseconds(1000), user, gateway});
  mobile->start();

  const bool all = testing::wait_until([&] { return store.event_count() == 10; }, std::chrono::seconds(8));
  mobile->stop();
  server->stop();
  watcher.stop();
  expect(all, fmt::format("store holds {} events, expected 10", store.event_count()));

  const auto latest = store.latest_location(user);
  expect(latest.has_value(), "no latest location");
  expect(latest->position == trace.back().position, "latest location differs from fix 10");
  const auto trail = store.trail(user);
  expect(trail.size() == 10, fmt::format("trail has {} points", trail.size()));
  for (std::size_t i = 0; i < trail.size(); ++i) {
    expect(trail[i].position == trace[i].position, fmt::format("trail point {} out of order", i));
    if (i > 0) expect(trail[i - 1].timestamp < trail[i].timestamp, "trail timestamps not increasing");
  }
  return "10 fixes end to end, latest and trail exact";
}

// --- A2 --------------------------------------------------------------------

std::string a2() {
  std::mt19937_64 rng(2002);
  std::size_t segments_total = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string text(rng() % 2001, ' ');
    for (auto& c : text) c = static_cast<char>(rng() % 128);
    auto segments = transport::sms_split(text, transport::MessageId(static_cast<std::uint32_t>(rng())));
    for (const auto& s : segments) {
      expect(s.wire_text().size() <= transport::kSmsLength, "segment exceeds 160 characters");
    }
    segments_total += segments.size();
    std::shuffle(segments.begin(), segments.end(), rng);
    const auto back = transport::sms_reassemble(segments);
    expect(std::holds_alternative<std::string>(back), "reassembly incomplete");
    expect(std::get<std::string>(back) == text, fmt::format("text {} changed in transit", i));
  }
  return fmt::format("1000 texts, {} segments", segments_total);
}

// --- A3 --------------------------------------------------------------------

const char* const kSchemaViolations[] = {
    "<locationEvent/>",
    "<position lat=\"1\" lon=\"2\"/>",
    "<locationEvent><position lat=\"56.3\" lon=\"-2.7\"/><timestamp>2002-09-01T12:00:00.000Z</timestamp>"
    "</locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><position lat=\"56.3\" lon=\"-2.7\"/></locationEvent>",
    "<locationEvent><user id=\"alice\"/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent><user/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><position lat=\"north\" lon=\"-2.7\"/>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><position lon=\"-2.7\"/>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><position lat=\"56.3\"/>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<timestamp>yesterday</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<timestamp>2002-09-01 12:00:00</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp><altitude>3</altitude></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><user id=\"+447700900124\"/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<position lat=\"56.3\" lon=\"-2.7\"/><timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\" name=\"x\"/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><position lat=\"56.3\" lon=\"-2.7\">here</position>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent>loose text<user id=\"+447700900123\"/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp></locationEvent>",
    "<locationEvent><user id=\"+447700900123\"/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<timestamp><when>2002-09-01T12:00:00.000Z</when></timestamp></locationEvent>",
    "<event><user id=\"+447700900123\"/><position lat=\"56.3\" lon=\"-2.7\"/>"
    "<timestamp>2002-09-01T12:00:00.000Z</timestamp></event>",
};

std::string a3() {
  std::mt19937_64 rng(1984);
  for (int i = 0; i < 1000; ++i) {
    const auto lat = static_cast<double>(static_cast<long long>(rng() % 18'000'001) - 9'000'000) / 1e5;
    const auto lon = static_cast<double>(static_cast<long long>(rng() % 36'000'001) - 18'000'000) / 1e5;
    std::string user = "+";
    for (unsigned d = 0, n = 7 + rng() % 9; d < n; ++d) user += static_cast<char>('0' + rng() % 10);
    const auto ms = static_cast<long long>(rng() % 4'102'444'800'000ULL);
    const auto e = at(UserId(user), {lat, lon}, ms);
    expect(transport::xml_decode(transport::xml_encode(e)) == e, fmt::format("event {} did not round-trip", i));
  }

  static_assert(std::size(kSchemaViolations) == 20);
  testing::TempDir dir;
  store::OntologyStore store(dir.path());
  int n = 0;
  for (const char* doc : kSchemaViolations) {
    const auto path = store.inbox_dir() / fmt::format("bad-{:02}.xml", n++);
    testing::write_file(path, doc);
    const auto report = store.ingest_file(path);
    expect(report.outcome == store::IngestReport::Outcome::quarantined, fmt::format("case {} was loaded", n));
    expect(report.reason == "SchemaViolation", fmt::format("case {} quarantined as {}", n, report.reason));
  }
  expect(store.event_count() == 0, "malformed input reached the store");
  expect(testing::count_files(store.quarantine_dir()) >= 20, "quarantine is missing files");
  return "1000 round-trips, 20 schema violations quarantined";
}

// --- A4 --------------------------------------------------------------------

class Probe final : public pipeline::Component {
 public:
  Probe(std::string id, std::vector<std::string>& log) : Component(std::move(id), "probe"), log_(log) {
    add_plug(pipeline::EventKind::record);
  }
  void put(const pipeline::Event&) override { log_.push_back(id()); }

 private:
  std::vector<std::string>& log_;
};

std::string a4() {
  for (int n : {0, 1, 5}) {
    std::vector<std::string> log;
    pipeline::Assembly a("fanout");
    a.emplace<pipeline::EventBus>("bus");
    std::vector<std::string> order;
    for (int i = n - 1; i >= 0; --i) {
      order.push_back("r" + std::to_string(i));
      a.emplace<Probe>(order.back(), log);
      a.connect("bus", order.back());
    }
    a.start();
    const auto e = at(UserId("+447700900123"), {56.34, -2.79}, 0);
    for (int m = 0; m < 100; ++m) a.inject("bus", pipeline::Event::record(e));
    a.stop();
    expect(log.size() == static_cast<std::size_t>(n) * 100, fmt::format("n={}: {} deliveries", n, log.size()));
    for (std::size_t k = 0; k < log.size(); ++k) {
      expect(log[k] == order[k % order.size()], fmt::format("n={}: delivery {} out of order", n, k));
    }
  }
  return "n in {0,1,5} x 100 puts";
}

// --- A5 --------------------------------------------------------------------

std::string a5() {
  // Independent great-circle values on R = 6371008.8 m (50-digit arithmetic).
  struct Pair {
    LatLongCoordinate a, b;
    double meters;
  };
  const Pair pairs[] = {
      {{56.3398, -2.7967}, {56.4620, -2.9707}, 17299.3810474},
      {{51.5074, -0.1278}, {48.8566, 2.3522}, 343556.534881},
      {{40.7128, -74.0060}, {34.0522, -118.2437}, 3935751.69089},
      {{-33.8688, 151.2093}, {35.6762, 139.6503}, 7825829.426},
      {{55.9533, -3.1883}, {55.8642, -4.2518}, 67019.603449},
  };
  double worst = 0;
  for (const auto& p : pairs) {
    const double d = services::haversine(p.a, p.b);
    worst = std::max(worst, std::abs(d - p.meters) / p.meters);
    expect(services::haversine(p.a, p.b) == services::haversine(p.b, p.a), "asymmetric distance");
    expect(services::haversine(p.a, p.a) == 0, "d(p,p) != 0");
  }
  expect(worst <= 1e-3, fmt::format("relative error {}", worst));
  const double degree = services::haversine({0, 0}, {0, 1});
  const double ideal = 6371008.8 * std::numbers::pi / 180;
  expect(std::abs(degree - ideal) / ideal <= 1e-4, "equator degree off");
  return fmt::format("worst relative error {:.2e}", worst);
}

// --- A6 --------------------------------------------------------------------

std::string a6() {
  std::mt19937_64 rng(606);
  const UserId users[] = {UserId("+447700900123"), UserId("+447700900456"), UserId("+447700900789")};
  std::size_t deliveries = 0;
  for (int walk = 0; walk < 100; ++walk) {
    store::OntologyStore store;
    services::LocationServices services(store);
    store::Knowledge k;
    for (int r = 0; r < 10; ++r) {
      store::Audience audience{rng() % 3 != 0, {}};
      if (!audience.everyone) audience.users.insert(users[rng() % 3].str());
      k.hearsay.push_back({"h" + std::to_string(r), users[0], near(rng, 56.34, -2.79, 0.01),
                           std::uniform_real_distribution<double>(50, 600)(rng), "m", audience});
    }
    store.set_knowledge(k);
    std::set<std::pair<std::string, std::string>> oracle_seen;
    for (int step = 0; step < 80; ++step) {
      const auto& user = users[rng() % 3];
      const auto e = at(user, near(rng, 56.34, -2.79, 0.013), step);
      std::vector<std::string> expected;
      for (const auto& h : k.hearsay) {
        const bool inside = services::haversine(e.position, h.region_center) <= h.region_radius_m;
        if (inside && h.audience.admits(user) && oracle_seen.insert({user.str(), h.id}).second) {
          expected.push_back(h.id);
        }
      }
      std::vector<std::string> got;
      for (const auto& h : services.hearsay_check(e)) got.push_back(h.id);
      std::sort(got.begin(), got.end());
      std::sort(expected.begin(), expected.end());
      expect(got == expected, fmt::format("walk {} step {} differs from the oracle", walk, step));
      deliveries += got.size();
    }
    for (const auto& u : users) {
      std::set<std::string> ids;
      for (const auto& h : services.delivered_to(u)) {
        expect(ids.insert(h.id).second, "hearsay delivered twice to " + u.str());
      }
    }
  }
  return fmt::format("100 walks, {} deliveries", deliveries);
}

// --- A7 --------------------------------------------------------------------

std::string a7() {
  std::mt19937_64 rng(707);
  store::OntologyStore store;
  services::LocationServices services(store);
  store::Knowledge k;
  const char* cats[] = {"pharmacy", "cafe", "library", "bank"};
  for (int i = 0; i < 50; ++i) {
    k.facilities.push_back({"f" + std::to_string(i), "F", cats[i % 4], near(rng, 56.34, -2.79, 0.02), ""});
  }
  for (int i = 0; i < 10; ++i) k.landmarks.push_back({"l" + std::to_string(i), "L", near(rng, 56.34, -2.79, 0.02)});
  std::vector<UserId> users;
  for (int i = 0; i < 5; ++i) users.emplace_back("+44770090200" + std::to_string(i));
  for (int i = 0; i < 5; ++i) {
    store::Audience a{i == 0, {}};
    if (i >= 2) a.users = {users[(i + 1) % 5].str(), users[(i + 3) % 5].str()};
    if (i != 1) k.visibility[users[i].str()] = a;
  }
  store.set_knowledge(k);
  for (const auto& u : users) store.add_event(at(u, near(rng, 56.34, -2.79, 0.02), 1));

  for (int q = 0; q < 200; ++q) {
    const double radius = std::uniform_real_distribution<double>(50, 4000)(rng);
    if (q % 2 == 0) {
      const auto pos = near(rng, 56.34, -2.79, 0.02);
      std::optional<std::string> cat;
      if (rng() % 2) cat = cats[rng() % 4];
      std::vector<std::pair<double, std::string>> oracle;
      for (const auto& f : k.facilities) {
        const double d = services::haversine(pos, f.position);
        if (d <= radius && (!cat || f.category == *cat)) oracle.emplace_back(d, f.id);
      }
      std::sort(oracle.begin(), oracle.end());
      const auto got = services.smart_town(pos, radius, cat);
      expect(got.entries.size() == oracle.size(), fmt::format("smart town query {} size", q));
      for (std::size_t i = 0; i < oracle.size(); ++i) {
        expect(got.entries[i].facility.id == oracle[i].second, fmt::format("smart town query {} rank {}", q, i));
      }
    } else {
      const auto& me = users[rng() % 5];
      const auto pos = store.latest_location(me)->position;
      std::vector<std::tuple<double, int, std::string>> oracle;
      for (const auto& l : k.landmarks) {
        if (services::haversine(pos, l.position) <= radius) oracle.emplace_back(services::haversine(pos, l.position), 0, l.id);
      }
      for (const auto& f : k.facilities) {
        if (services::haversine(pos, f.position) <= radius) oracle.emplace_back(services::haversine(pos, f.position), 1, f.id);
      }
      for (const auto& u : users) {
        if (u == me) continue;
        const auto vis = k.visibility.find(u.str());
        if (vis == k.visibility.end() || !vis->second.admits(me)) continue;
        const auto upos = store.latest_location(u)->position;
        if (services::haversine(pos, upos) <= radius) oracle.emplace_back(services::haversine(pos, upos), 2, u.str());
      }
      std::sort(oracle.begin(), oracle.end());
      const auto got = services.radar(me, radius);
      expect(got.size() == oracle.size(), fmt::format("radar query {} size {} vs {}", q, got.size(), oracle.size()));
      for (std::size_t i = 0; i < got.size(); ++i) {
        expect(got[i].id == std::get<2>(oracle[i]), fmt::format("radar query {} rank {}", q, i));
        expect(got[i].id != me.str(), "radar lists the querying user");
      }
    }
  }
  return "200 queries match the oracles";
}

// --- A8 --------------------------------------------------------------------

json link_json(const std::string& a, const std::string& b, double loss = 0, int latency = 10) {
  return {{"a", a}, {"b", b}, {"kind", "IP"}, {"latency", {{"fixed", latency}}}, {"loss", loss}};
}

sim::TopologySpec topology(const std::vector<std::string>& nodes, const json& links) {
  json n = json::array();
  for (const auto& id : nodes) n.push_back({{"id", id}, {"role", "HUB"}});
  return sim::parse_topology(json{{"nodes", n}, {"links", links}}.dump());
}

sim::SimMessage message(const std::string& id, const std::string& from, std::optional<std::string> to,
                        std::int64_t t = 0) {
  return sim::SimMessage{id, from, std::move(to), "location_event", 100, t};
}

std::string a8() {
  const auto lossy = topology({"A", "B", "C", "D"}, json::array({link_json("A", "B", 0.2), link_json("B", "C", 0.1),
                                                               link_json("C", "D", 0.3), link_json("A", "D", 0.05)}));
  std::vector<sim::SimMessage> w;
  for (int i = 0; i < 200; ++i) w.push_back(message("m" + std::to_string(i), i % 2 ? "A" : "C", i % 3 ? "D" : "B", i));
  const sim::FloodPolicy flood4(4);
  const auto first = sim::metrics_to_json(sim::run_simulation(lossy, w, flood4, {99}).metrics);
  const auto second = sim::metrics_to_json(sim::run_simulation(lossy, w, flood4, {99}).metrics);
  expect(first == second, "same seed gave different metrics");

  const auto two = sim::load_topology(testing::fixture("topology_2node.json"));
  const auto one = sim::run_simulation(two, sim::load_workload(testing::fixture("workload_1msg.json")), flood4, {}).metrics;
  expect(one.delivery_ratio == 1.0, "2-node delivery ratio");
  expect(one.deliveries.size() == 1 && one.deliveries[0].latency_ms == 10, "2-node latency");

  const auto k3 = topology({"A", "B", "C"}, json::array({link_json("A", "B"), link_json("A", "C"), link_json("B", "C")}));
  const auto km = sim::run_simulation(k3, {message("m", "A", "C")}, sim::FloodPolicy(2), {}).metrics;
  expect(km.transmissions == 4, fmt::format("K3 transmissions {}", km.transmissions));
  expect(km.duplicates_suppressed == 2, fmt::format("K3 duplicates {}", km.duplicates_suppressed));

  const auto hop = topology({"A", "B"}, json::array({link_json("A", "B", 0.3)}));
  std::vector<sim::SimMessage> many;
  for (int i = 0; i < 10000; ++i) many.push_back(message("m" + std::to_string(i), "A", "B", i));
  const auto lm = sim::run_simulation(hop, many, sim::FloodPolicy(1), {2024}).metrics;
  expect(std::abs(lm.delivery_ratio - 0.7) <= 0.02, fmt::format("loss 0.3 delivery ratio {}", lm.delivery_ratio));
  return fmt::format("deterministic, K3 4/2, loss ratio {:.4f}", lm.delivery_ratio);
}

// --- A9 --------------------------------------------------------------------

struct RefCounts {
  std::uint64_t transmissions = 0;
  std::uint64_t delivered = 0;
  std::uint64_t duplicates = 0;
};

// Synchronous rounds: every copy sent in round r arrives in round r + 1.
RefCounts reference_flood(int n, const std::vector<std::pair<int, int>>& edges, int origin, std::optional<int> dest,
                          int ttl) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  RefCounts c;
  std::vector<bool> seen(n, false);
  seen[origin] = true;
  struct Copy {
    int from, to;
  };
  std::vector<Copy> in_flight;
  for (int v : adj[origin]) in_flight.push_back({origin, v});
  c.transmissions += in_flight.size();
  for (int hops = 1; !in_flight.empty(); ++hops) {
    std::vector<Copy> next;
    for (const auto& copy : in_flight) {
      if (seen[copy.to]) {
        ++c.duplicates;
        continue;
      }
      seen[copy.to] = true;
      if (dest ? copy.to == *dest : copy.to != origin) ++c.delivered;
      if (hops >= ttl) continue;
      for (int v : adj[copy.to]) {
        if (v != copy.from) next.push_back({copy.to, v});
      }
    }
    c.transmissions += next.size();
    in_flight = std::move(next);
  }
  return c;
}

bool connected(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
  for (auto [a, b] : edges) parent[root(a)] = root(b);
  for (int i = 1; i < n; ++i) {
    if (root(i) != root(0)) return false;
  }
  return true;
}

std::string a9() {
  const int ttl = 4;
  const sim::FloodPolicy flood(ttl);
  std::size_t graphs = 0, runs = 0;
  for (int n = 1; n <= 5; ++n) {
    std::vector<std::pair<int, int>> all;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) all.emplace_back(a, b);
    }
    for (std::uint32_t mask = 0; mask < (1u << all.size()); ++mask) {
      std::vector<std::pair<int, int>> edges;
      for (std::size_t e = 0; e < all.size(); ++e) {
        if (mask & (1u << e)) edges.push_back(all[e]);
      }
      if (!connected(n, edges)) continue;
      ++graphs;
      std::vector<std::string> names;
      for (int i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
      json links = json::array();
      for (auto [a, b] : edges) links.push_back(link_json(names[a], names[b]));
      const auto spec = topology(names, links);
      for (int origin = 0; origin < n; ++origin) {
        for (int d = -1; d < n; ++d) {
          if (d == origin) continue;
          std::optional<int> dest;
          if (d >= 0) dest = d;
          const auto got = sim::run_simulation(
                               spec, {message("m", names[origin], dest ? std::optional(names[*dest]) : std::nullopt)},
                               flood, {})
                               .metrics;
          const auto want = reference_flood(n, edges, origin, dest, ttl);
          ++runs;
          const auto where = fmt::format("n={} mask={} origin={} dest={}", n, mask, origin, d);
          expect(got.transmissions == want.transmissions,
                 fmt::format("{}: transmissions {} vs {}", where, got.transmissions, want.transmissions));
          expect(got.delivered == want.delivered,
                 fmt::format("{}: delivered {} vs {}", where, got.delivered, want.delivered));
          expect(got.duplicates_suppressed == want.duplicates,
                 fmt::format("{}: duplicates {} vs {}", where, got.duplicates_suppressed, want.duplicates));
        }
      }
    }
  }
  return fmt::format("{} graphs, {} runs", graphs, runs);
}

// --- A10 -------------------------------------------------------------------

const char* const kKinds[] = {"event_bus", "gps_source", "sms_device", "sms_xml_device", "xml_codec_adapter",
                              "file_sink", "teleporter"};

json random_component(std::mt19937_64& rng, const std::string& id, const std::string& trace) {
  const std::string kind = kKinds[rng() % std::size(kKinds)];
  json params = json::object();
  if (kind == "gps_source") {
    params = {{"trace", trace}, {"user", "+447700900123"}};
  } else if (kind == "sms_device" || kind == "sms_xml_device") {
    params = {{"gateway", "loopback"}, {"own_number", "+44770090" + std::to_string(1000 + rng() % 9000)}};
  } else if (kind == "xml_codec_adapter") {
    params = {{"direction", rng() % 2 ? "record_to_text" : "text_to_record"}};
  } else if (kind == "file_sink") {
    params = {{"directory", "sink-" + id}};
  }
  return {{"id", id}, {"catalog_kind", kind}, {"params", params}};
}

// A well-wired chain, sometimes with one connection rewired at random.
json chain_spec(std::mt19937_64& rng, const std::string& trace) {
  json components = json::array(), connections = json::array();
  const auto add = [&](const std::string& id, const char* kind, json params) {
    components.push_back({{"id", id}, {"catalog_kind", kind}, {"params", std::move(params)}});
    if (components.size() > 1) {
      connections.push_back({{"from", components[components.size() - 2]["id"]}, {"to", id}});
    }
  };
  switch (rng() % 3) {
    case 0:
      add("gps", "gps_source", {{"trace", trace}, {"user", "+447700900123"}});
      add("gen", "xml_codec_adapter", {{"direction", "record_to_text"}});
      add("sms", "sms_device", {{"gateway", "loopback"}, {"own_number", "+447700900123"}});
      break;
    case 1:
      add("sms", "sms_xml_device", {{"gateway", "loopback"}, {"own_number", "+447700900000"}});
      add("saviour", "file_sink", {{"directory", "inbox"}});
      break;
    default:
      add("parse", "xml_codec_adapter", {{"direction", "text_to_record"}});
      add("bus", "event_bus", json::object());
      add("out", "xml_codec_adapter", {{"direction", "record_to_text"}});
      break;
  }
  if (rng() % 2) {
    const auto& from = components[rng() % components.size()]["id"];
    const auto& to = components[rng() % components.size()]["id"];
    connections.push_back({{"from", from}, {"to", to}});
  }
  return {{"components", components}, {"connections", connections}};
}

json random_spec(std::mt19937_64& rng, const std::string& trace) {
  if (rng() % 2) return chain_spec(rng, trace);
  json components = json::array(), connections = json::array();
  const int n = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < n; ++i) {
    std::string id = "c" + std::to_string(i);
    if (i > 0 && rng() % 12 == 0) id = "c" + std::to_string(rng() % i);
    components.push_back(random_component(rng, id, trace));
  }
  const int m = static_cast<int>(rng() % 7);
  for (int i = 0; i < m; ++i) {
    const auto pick = [&] {
      return rng() % 15 == 0 ? std::string("ghost") : "c" + std::to_string(rng() % n);
    };
    connections.push_back({{"from", pick()}, {"to", pick()}});
  }
  return {{"components", components}, {"connections", connections}};
}

std::unique_ptr<pipeline::Component> direct_component(const json& c, const fs::path& base,
                                                      const std::shared_ptr<transport::SmsGateway>& gateway) {
  const std::string id = c["id"];
  const std::string kind = c["catalog_kind"];
  const json& p = c["params"];
  if (kind == "event_bus") return std::make_unique<pipeline::EventBus>(id);
  if (kind == "gps_source") {
    return std::make_unique<transport::GpsSource>(id, transport::load_gps_trace(p["trace"].get<std::string>()),
                                                  std::chrono::milliseconds(1000), UserId(p["user"].get<std::string>()));
  }
  if (kind == "sms_device" || kind == "sms_xml_device") {
    return std::make_unique<transport::SmsDevice>(
        id, transport::SmsDevice::Options{gateway, UserId(p["own_number"].get<std::string>()), std::nullopt, kind == "sms_xml_device"});
  }
  if (kind == "xml_codec_adapter") {
    return std::make_unique<pipeline::CodecAdapter>(id, *pipeline::parse_adapt_direction(p["direction"].get<std::string>()),
                                                    transport::location_codec());
  }
  if (kind == "file_sink") {
    fs::create_directories(base / p["directory"].get<std::string>());
    return std::make_unique<transport::FileSink>(id, base / p["directory"].get<std::string>());
  }
  throw Error(Errc::UnknownCatalogKind, "no such kind " + kind);
}

// "ok" or the error code name.
std::string direct_verdict(const json& spec, const fs::path& base) {
  auto gateway = std::make_shared<transport::LoopbackGateway>();
  try {
    pipeline::Assembly a("direct");
    for (const auto& c : spec["components"]) {
      if (a.find(c["id"].get<std::string>()) != nullptr) throw Error(Errc::DuplicateComponent, "duplicate");
      a.add(direct_component(c, base, gateway));
    }
    for (const auto& c : spec["connections"]) a.connect(c["from"].get<std::string>(), c["to"].get<std::string>());
  } catch (const Error& e) {
    return std::string(to_string(e.code()));
  }
  return "ok";
}

std::string url_noise(std::mt19937_64& rng) {
  static const std::string alphabet = "abcXYZ019+-._~";
  std::string s;
  for (std::size_t i = 0, n = rng() % 24; i < n; ++i) {
    if (rng() % 5 == 0) {
      s += fmt::format("%{:02X}", static_cast<unsigned>(rng() % 256));
    } else {
      s += alphabet[rng() % alphabet.size()];
    }
  }
  return s;
}

std::string a10() {
  testing::TempDir dir;
  fs::copy(testing::fixture("data"), dir.path(), fs::copy_options::recursive);
  control::ControlPlaneOptions o;
  o.data_dir = dir.path();
  o.watch_inbox = false;
  control::ControlPlane plane(o);
  const int port = plane.bind("127.0.0.1", 0);
  plane.start_background();
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(10, 0);

  testing::TempDir direct_dir;
  const std::string trace = testing::fixture("trace_10.jsonl").string();
  std::mt19937_64 rng(1010);
  std::size_t accepted = 0;
  std::map<std::string, int> verdicts;
  for (int i = 0; i < 200; ++i) {
    const auto spec = random_spec(rng, trace);
    const auto want = direct_verdict(spec, direct_dir.path());
    const auto r = client.Post("/assemblies", spec.dump(), "application/json");
    expect(static_cast<bool>(r), "no response from the control plane");
    std::string got = "ok";
    if (r->status != 201) got = json::parse(r->body).value("error", std::string("?"));
    if (r->status == 201) ++accepted;
    ++verdicts[got];
    expect(got == want, fmt::format("spec {}: HTTP says {} ({}), direct says {}\n{}", i, got, r->status, want,
                                    spec.dump()));
    if (r->status != 201) expect(r->status == 422 || r->status == 400, fmt::format("spec {}: status {}", i, r->status));
  }

  std::size_t fuzzed = 0;
  for (int i = 0; i < 400; ++i) {
    const auto noise = url_noise(rng);
    const std::string paths[] = {
        "/users/" + noise + "/location",
        "/users/%2B447700900123/trail?from=" + noise + "&to=" + url_noise(rng),
        "/users/" + noise + "/radar?radius=" + url_noise(rng),
        "/users/" + noise + "/hearsay",
        "/smarttown?lat=" + noise + "&lon=" + url_noise(rng) + "&radius=" + url_noise(rng),
        "/smarttown?lat=56.34&lon=-2.79&radius=" + noise + "&category=" + url_noise(rng),
        "/simulations/" + noise + "/metrics",
        "/assemblies/" + noise + "/events",
        "/maps/" + noise,
    };
    const auto& path = paths[rng() % std::size(paths)];
    const auto r = client.Get(path.c_str());
    expect(static_cast<bool>(r), "no response for " + path);
    expect(r->status < 500, fmt::format("{} returned {}", path, r->status));
    ++fuzzed;
  }
  plane.stop();
  std::string mix;
  for (const auto& [verdict, count] : verdicts) mix += fmt::format(" {}={}", verdict, count);
  return fmt::format("200 specs agree ({} accepted;{}), {} fuzzed queries below 500", accepted, mix, fuzzed);
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    std::function<std::string()> run;
    double budget_s;
  };
  const Criterion criteria[] = {
      {"A1", a1, 10}, {"A2", a2, 5}, {"A3", a3, 5},   {"A4", a4, 1},   {"A5", a5, 1},
      {"A6", a6, 10}, {"A7", a7, 5}, {"A8", a8, 30}, {"A9", a9, 60}, {"A10", a10, 30},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && elapsed > c.budget_s) {
      ok = false;
      detail += fmt::format("; took {:.2f} s, budget {} s", elapsed, c.budget_s);
    }
    if (!ok) ++failures;
    std::printf("%s %s %s (%.3f s)\n", c.id, ok ? "PASS" : "FAIL", detail.c_str(), elapsed);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
