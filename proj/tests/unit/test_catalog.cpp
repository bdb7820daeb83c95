#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "gloss/catalog/catalog.hpp"
#include "gloss/error.hpp"
#include "test_support.hpp"

using namespace gloss;
using namespace gloss::catalog;
using nlohmann::json;

namespace {

Errc build_error(const AssemblySpecDoc& doc, const BuildContext& ctx) {
  try {
    ComponentCatalog().build("t", doc, ctx);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected the build to fail");
  return Errc::IoFailure;
}

AssemblySpecDoc mobile_doc(const std::string& trace) {
  AssemblySpecDoc d;
  d.components = {
      {"gps", "gps_source", {{"trace", trace}, {"user", "+447700900123"}, {"interval_ms", "500"}}},
      {"gen", "xml_codec_adapter", {{"direction", "record_to_text"}}},
      {"parse", "xml_codec_adapter", {{"direction", "text_to_record"}}},
      {"bus", "event_bus", {}},
      {"out", "xml_codec_adapter", {{"direction", "record_to_text"}}},
      {"sms", "sms_device",
       {{"gateway", "loopback"}, {"own_number", "+447700900123"}, {"recipient", "+447700900000"}}},
  };
  d.connections = {{"gps", "gen"}, {"gen", "parse"}, {"parse", "bus"}, {"bus", "out"}, {"out", "sms"}};
  return d;
}

}  // namespace

TEST_CASE("catalog lists the standard component set") {
  ComponentCatalog catalog;
  for (auto kind : {"event_bus", "gps_source", "sms_device", "sms_xml_device", "xml_codec_adapter", "file_sink"}) {
    CAPTURE(kind);
    CHECK(catalog.find(kind) != nullptr);
  }
  CHECK(catalog.find("teleporter") == nullptr);
  CHECK(catalog.to_json() == ComponentCatalog().to_json());
  const auto j = json::parse(catalog.to_json());
  REQUIRE(j["components"].size() == 6);
  for (const auto& entry : j["components"]) {
    CHECK(entry.contains("params"));
    CHECK((entry.contains("ports") || entry.contains("port_variants")));
  }
  const auto* bus = catalog.find("event_bus");
  REQUIRE(bus->ports.size() == 2);
}

TEST_CASE("assembly spec documents parse and serialize") {
  const auto doc = mobile_doc("trace.jsonl");
  CHECK(parse_assembly_spec(assembly_spec_to_json(doc)) == doc);
  const auto numeric = parse_assembly_spec(
      R"({"components":[{"id":"g","catalog_kind":"gps_source","params":{"interval_ms":250,"trace":"t","user":"+4411111111"}}]})");
  CHECK(numeric.components[0].params.at("interval_ms") == "250");
  CHECK(numeric.connections.empty());
  for (auto bad : {"", "{", "[]", R"({"components":{}})", R"({"components":[{"id":1,"catalog_kind":"x"}]})",
                   R"({"components":[{"id":"a","catalog_kind":"event_bus","params":[]}]})",
                   R"({"components":[],"connections":[{"from":"a"}]})"}) {
    CAPTURE(bad);
    try {
      parse_assembly_spec(bad);
      FAIL("expected ParseFailure");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ParseFailure);
    }
  }
}

TEST_CASE("catalog builds the mobile assembly") {
  transport::GatewayRegistry gateways;
  BuildContext ctx{&gateways, GLOSS_FIXTURES_DIR};
  auto assembly = ComponentCatalog().build("m", mobile_doc("trace_10.jsonl"), ctx);
  CHECK(assembly->components().size() == 6);
  CHECK(assembly->connections().size() == 5);
  assembly->start();
  CHECK(gateways.loopback()->segments_sent() == 20);
  assembly->stop();
}

TEST_CASE("catalog build errors") {
  transport::GatewayRegistry gateways;
  testing::TempDir dir;
  BuildContext ctx{&gateways, GLOSS_FIXTURES_DIR};

  auto d = mobile_doc("trace_10.jsonl");
  d.components[3].catalog_kind = "teleporter";
  CHECK(build_error(d, ctx) == Errc::UnknownCatalogKind);

  d = mobile_doc("trace_10.jsonl");
  d.components[0].params.erase("user");
  CHECK(build_error(d, ctx) == Errc::MissingParam);

  d = mobile_doc("trace_10.jsonl");
  d.components[0].params["user"] = "alice";
  CHECK(build_error(d, ctx) == Errc::InvalidParam);

  d = mobile_doc("trace_10.jsonl");
  d.components[0].params["interval_ms"] = "0";
  CHECK(build_error(d, ctx) == Errc::InvalidParam);

  d = mobile_doc("missing.jsonl");
  CHECK(build_error(d, ctx) == Errc::InvalidParam);

  d = mobile_doc("trace_10.jsonl");
  d.components[1].params["direction"] = "sideways";
  CHECK(build_error(d, ctx) == Errc::InvalidParam);

  d = mobile_doc("trace_10.jsonl");
  d.components[1].params["colour"] = "red";
  CHECK(build_error(d, ctx) == Errc::InvalidParam);

  d = mobile_doc("trace_10.jsonl");
  d.components[5].params["gateway"] = "pigeon";
  CHECK(build_error(d, ctx) == Errc::InvalidParam);

  d = mobile_doc("trace_10.jsonl");
  d.components[4].id = "bus";
  CHECK(build_error(d, ctx) == Errc::DuplicateComponent);

  d = mobile_doc("trace_10.jsonl");
  d.connections.push_back({"sms", "ghost"});
  CHECK(build_error(d, ctx) == Errc::UnknownComponent);

  d = mobile_doc("trace_10.jsonl");
  d.connections[0] = {"gps", "sms"};
  CHECK(build_error(d, ctx) == Errc::KindMismatch);

  d = mobile_doc("trace_10.jsonl");
  d.connections.push_back({"bus", "parse"});
  CHECK(build_error(d, ctx) == Errc::KindMismatch);

  AssemblySpecDoc cyc;
  cyc.components = {{"a", "event_bus", {}}, {"b", "event_bus", {}}};
  cyc.connections = {{"a", "b"}, {"b", "a"}};
  CHECK(build_error(cyc, ctx) == Errc::CycleWouldForm);

  AssemblySpecDoc empty_id;
  empty_id.components = {{"", "event_bus", {}}};
  CHECK(build_error(empty_id, ctx) == Errc::InvalidParam);
}

TEST_CASE("file_sink creates its directory") {
  testing::TempDir dir;
  transport::GatewayRegistry gateways;
  BuildContext ctx{&gateways, dir.path()};
  auto c = ComponentCatalog().instantiate({"sink", "file_sink", {{"directory", "out/inbox"}}}, ctx);
  CHECK(c->catalog_kind() == "file_sink");
  CHECK(std::filesystem::is_directory(dir / "out/inbox"));
}

TEST_CASE("adapter ports follow the direction param") {
  transport::GatewayRegistry gateways;
  BuildContext ctx{&gateways, "."};
  ComponentCatalog catalog;
  auto up = catalog.instantiate({"a", "xml_codec_adapter", {{"direction", "record_to_text"}}}, ctx);
  CHECK(up->plug(pipeline::EventKind::record));
  CHECK(up->socket(pipeline::EventKind::text));
  auto down = catalog.instantiate({"b", "xml_codec_adapter", {{"direction", "text_to_record"}}}, ctx);
  CHECK(down->plug(pipeline::EventKind::text));
  CHECK(down->socket(pipeline::EventKind::record));
}
