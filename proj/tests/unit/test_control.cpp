#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "gloss/control/server.hpp"
#include "gloss/control/tap.hpp"
#include "test_support.hpp"

using namespace gloss;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Node {
  testing::TempDir dir;
  std::unique_ptr<control::ControlPlane> plane;
  int port = 0;

  explicit Node(std::uint64_t budget = 1'000'000, bool with_data = true) {
    if (with_data) {
      fs::copy(fs::path(GLOSS_FIXTURES_DIR) / "data", dir.path(), fs::copy_options::recursive);
    }
    control::ControlPlaneOptions o;
    o.data_dir = dir.path();
    o.simulation_budget = budget;
    o.watch_inbox = true;
    o.watch_interval = std::chrono::milliseconds(20);
    plane = std::make_unique<control::ControlPlane>(o);
    port = plane->bind("127.0.0.1", 0);
    plane->start_background();
  }
  ~Node() { plane->stop(); }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    return c;
  }
};

struct Reply {
  int status = 0;
  json body;
};

Reply get(const Node& n, const std::string& path) {
  auto r = n.client().Get(path.c_str());
  REQUIRE(r);
  Reply out{r->status, json()};
  if (!r->body.empty()) out.body = json::parse(r->body, nullptr, false);
  return out;
}

Reply post(const Node& n, const std::string& path, const std::string& body) {
  auto r = n.client().Post(path.c_str(), body, "application/json");
  REQUIRE(r);
  Reply out{r->status, json()};
  if (!r->body.empty()) out.body = json::parse(r->body, nullptr, false);
  return out;
}

std::string trace_path(const char* name) { return (fs::path(GLOSS_FIXTURES_DIR) / name).string(); }

json mobile_spec(const std::string& trace) {
  return {{"components",
           {{{"id", "gps"},
             {"catalog_kind", "gps_source"},
             {"params", {{"trace", trace}, {"user", "+447700900123"}, {"interval_ms", "1000"}}}},
            {{"id", "gen"}, {"catalog_kind", "xml_codec_adapter"}, {"params", {{"direction", "record_to_text"}}}},
            {{"id", "sms"},
             {"catalog_kind", "sms_device"},
             {"params", {{"gateway", "loopback"}, {"own_number", "+447700900123"}, {"recipient", "+447700900000"}}}}}},
          {"connections", {{{"from", "gps"}, {"to", "gen"}}, {{"from", "gen"}, {"to", "sms"}}}}};
}

json server_spec() {
  return {{"components",
           {{{"id", "sms"},
             {"catalog_kind", "sms_xml_device"},
             {"params", {{"gateway", "loopback"}, {"own_number", "+447700900000"}}}},
            {{"id", "saviour"}, {"catalog_kind", "file_sink"}, {"params", {{"directory", "inbox"}}}}}},
          {"connections", {{{"from", "sms"}, {"to", "saviour"}}}}};
}

std::string file_text(const char* name) { return testing::read_file(fs::path(GLOSS_FIXTURES_DIR) / name); }

json simulation(std::uint64_t seed = 0) {
  return {{"topology", json::parse(file_text("topology_2node.json"))},
          {"workload", json::parse(file_text("workload_1msg.json"))},
          {"seed", seed}};
}

}  // namespace

TEST_CASE("catalog endpoint") {
  Node n;
  const auto r = get(n, "/components");
  CHECK(r.status == 200);
  CHECK(r.body["components"].size() == 6);
  CHECK(get(n, "/").status == 200);
}

TEST_CASE("assembly lifecycle over HTTP") {
  Node n;
  auto created = post(n, "/assemblies", mobile_spec(trace_path("trace_10.jsonl")).dump());
  REQUIRE(created.status == 201);
  CHECK(created.body["state"] == "CREATED");
  const std::string id = created.body["id"];

  CHECK(get(n, "/assemblies").body["assemblies"].size() == 1);
  const auto detail = get(n, "/assemblies/" + id);
  CHECK(detail.status == 200);
  CHECK(detail.body["spec"]["components"].size() == 3);

  const auto started = post(n, "/assemblies/" + id + "/start", "");
  CHECK(started.status == 200);
  CHECK(started.body["state"] == "RUNNING");
  CHECK(post(n, "/assemblies/" + id + "/start", "").status == 409);

  const auto events = get(n, "/assemblies/" + id + "/events");
  CHECK(events.status == 200);
  CHECK(events.body["events"].size() >= 10);
  for (const auto& e : events.body["events"]) CHECK(e["preview"].get<std::string>().size() <= control::kPreviewLimit);

  CHECK(post(n, "/assemblies/" + id + "/stop", "").body["state"] == "STOPPED");
  CHECK(n.client().Delete(("/assemblies/" + id).c_str())->status == 200);
  CHECK(get(n, "/assemblies/" + id).status == 404);
  CHECK(get(n, "/assemblies/" + id).body["error"] == "UnknownAssembly");
}

TEST_CASE("rejected assembly specs") {
  Node n;
  auto bad = mobile_spec(trace_path("trace_10.jsonl"));
  bad["connections"][0] = {{"from", "gps"}, {"to", "sms"}};
  const auto r = post(n, "/assemblies", bad.dump());
  CHECK(r.status == 422);
  CHECK(r.body["error"] == "KindMismatch");
  CHECK(post(n, "/assemblies", "{not json").status == 400);
  auto cyclic = json{{"components",
                      {{{"id", "a"}, {"catalog_kind", "event_bus"}}, {{"id", "b"}, {"catalog_kind", "event_bus"}}}},
                     {"connections", {{{"from", "a"}, {"to", "b"}}, {{"from", "b"}, {"to", "a"}}}}};
  CHECK(post(n, "/assemblies", cyclic.dump()).body["error"] == "CycleWouldForm");
  CHECK(get(n, "/assemblies").body["assemblies"].empty());
}

TEST_CASE("location flows from a mobile assembly into the store") {
  Node n;
  const auto server = post(n, "/assemblies", server_spec().dump());
  REQUIRE(server.status == 201);
  REQUIRE(post(n, "/assemblies/" + server.body["id"].get<std::string>() + "/start", "").status == 200);
  const auto mobile = post(n, "/assemblies", mobile_spec(trace_path("trace_10.jsonl")).dump());
  REQUIRE(mobile.status == 201);
  REQUIRE(post(n, "/assemblies/" + mobile.body["id"].get<std::string>() + "/start", "").status == 200);

  CHECK(testing::wait_until([&] { return n.plane->store().event_count() == 10; }));
  const auto loc = get(n, "/users/%2B447700900123/location");
  REQUIRE(loc.status == 200);
  CHECK(loc.body["lat"].get<double>() == doctest::Approx(56.3447));
  CHECK(loc.body["lon"].get<double>() == doctest::Approx(-2.7892));
  CHECK(loc.body["map"]["image_id"] == "st-andrews");

  const auto trail = get(n, "/users/%2B447700900123/trail");
  CHECK(trail.status == 200);
  CHECK(trail.body["points"].size() == 10);
  const auto inverted =
      get(n, "/users/%2B447700900123/trail?from=2024-05-01T10:00:00.000Z&to=2024-05-01T09:00:00.000Z");
  CHECK(inverted.status == 400);
  CHECK(inverted.body["error"] == "InvalidRange");

  const auto radar = get(n, "/users/%2B447700900123/radar?radius=5000");
  CHECK(radar.status == 200);
  CHECK(!radar.body["entries"].empty());
  CHECK(get(n, "/users").body["users"].size() == 1);
}

TEST_CASE("query errors") {
  Node n;
  const auto missing = get(n, "/users/%2B447700900999/location");
  CHECK(missing.status == 404);
  CHECK(missing.body["error"] == "NoKnownLocation");
  CHECK(get(n, "/users/bob/location").status == 400);
  CHECK(get(n, "/smarttown?lat=56.34").status == 400);
  CHECK(get(n, "/smarttown?lat=abc&lon=0&radius=1").status == 400);
}

TEST_CASE("smart town over HTTP") {
  Node n;
  const auto r = get(n, "/smarttown?lat=56.3405&lon=-2.795&radius=500&category=pharmacy");
  REQUIRE(r.status == 200);
  REQUIRE(r.body["entries"].size() == 1);
  CHECK(r.body["entries"][0]["id"] == "f-pharm");
  const auto all = get(n, "/smarttown?lat=56.3405&lon=-2.795&radius=100");
  CHECK(all.body["entries"].size() == 2);
}

TEST_CASE("simulations over HTTP") {
  Node n;
  const auto r = post(n, "/simulations", simulation().dump());
  REQUIRE(r.status == 201);
  CHECK(r.body["metrics"]["delivery_ratio"].get<double>() == 1.0);
  const std::string id = r.body["id"];
  CHECK(get(n, "/simulations/" + id + "/metrics").body == r.body["metrics"]);
  auto csv = n.client().Get(("/simulations/" + id + "/metrics?format=csv").c_str());
  REQUIRE(csv);
  CHECK(csv->body.rfind("msg_id,latency_ms,hops\n", 0) == 0);
  CHECK(get(n, "/simulations/nope/metrics").status == 404);

  auto again = post(n, "/simulations", simulation().dump());
  CHECK(again.body["metrics"] == r.body["metrics"]);

  auto bad = simulation();
  bad["topology"]["links"][0]["b"] = "Z";
  CHECK(post(n, "/simulations", bad.dump()).status == 422);
  CHECK(post(n, "/simulations", "[1,2").status == 400);
  CHECK(post(n, "/simulations", json{{"workload", json::array()}}.dump()).status == 400);
}

TEST_CASE("simulation budget") {
  Node n(2);
  const auto r = post(n, "/simulations", simulation().dump());
  CHECK(r.status == 413);
  CHECK(r.body["error"] == "PayloadTooLarge");
}

TEST_CASE("stream ends after the assembly stops") {
  Node n;
  const auto created = post(n, "/assemblies", mobile_spec(trace_path("trace_10.jsonl")).dump());
  const std::string id = created.body["id"];
  REQUIRE(post(n, "/assemblies/" + id + "/start", "").status == 200);
  std::thread stopper([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    post(n, "/assemblies/" + id + "/stop", "");
  });
  auto c = n.client();
  std::string body;
  auto r = c.Get(("/assemblies/" + id + "/stream").c_str(), [&](const char* data, std::size_t len) {
    body.append(data, len);
    return true;
  });
  stopper.join();
  REQUIRE(r);
  CHECK(r->status == 200);
  std::size_t lines = 0;
  std::istringstream in(body);
  for (std::string line; std::getline(in, line);) {
    CHECK(json::parse(line).contains("seq"));
    ++lines;
  }
  CHECK(lines >= 10);
}

TEST_CASE("assemblies survive a restart") {
  testing::TempDir dir;
  std::string id;
  {
    control::ControlPlaneOptions o;
    o.data_dir = dir.path();
    o.watch_inbox = false;
    control::ControlPlane plane(o);
    const int port = plane.bind("127.0.0.1", 0);
    plane.start_background();
    httplib::Client c("127.0.0.1", port);
    auto r = c.Post("/assemblies", mobile_spec(trace_path("trace_10.jsonl")).dump(), "application/json");
    REQUIRE(r);
    id = json::parse(r->body)["id"];
    plane.stop();
  }
  control::ControlPlaneOptions o;
  o.data_dir = dir.path();
  o.watch_inbox = false;
  control::ControlPlane plane(o);
  const int port = plane.bind("127.0.0.1", 0);
  plane.start_background();
  httplib::Client c("127.0.0.1", port);
  auto r = c.Get(("/assemblies/" + id).c_str());
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["state"] == "CREATED");
  plane.stop();
}

TEST_CASE("garbage requests never produce server errors") {
  Node n;
  std::mt19937_64 rng(7);
  const std::vector<std::string> paths = {"/assemblies", "/simulations", "/assemblies/x/start",
                                          "/users/%2B447700900123/trail?from=zz", "/smarttown?lat=&lon=&radius="};
  const std::string alphabet = "{}[]\":,abc019 -.\\";
  for (int i = 0; i < 150; ++i) {
    std::string body;
    const auto len = rng() % 40;
    for (std::size_t k = 0; k < len; ++k) body += alphabet[rng() % alphabet.size()];
    const auto& path = paths[rng() % paths.size()];
    auto c = n.client();
    auto r = (rng() % 2) ? c.Post(path.c_str(), body, "application/json") : c.Get(path.c_str());
    REQUIRE(r);
    CAPTURE(path);
    CAPTURE(body);
    CHECK(r->status < 500);
  }
}
