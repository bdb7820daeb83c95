#include "gloss/catalog/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <set>

#include "gloss/error.hpp"
#include "gloss/pipeline/components.hpp"
#include "gloss/transport/file_sink.hpp"
#include "gloss/transport/gps.hpp"
#include "gloss/transport/sms_device.hpp"
#include "gloss/transport/xml_codec.hpp"

namespace gloss::catalog {

using nlohmann::ordered_json;
using pipeline::EventKind;
using pipeline::PortDirection;

namespace {

[[noreturn]] void invalid(const ComponentSpec& spec, const std::string& msg) {
  throw Error(Errc::InvalidParam, fmt::format("{}: {}", spec.id, msg));
}

ParamSchema param(std::string name, ParamType type, std::string description) {
  return {std::move(name), type, true, std::nullopt, {}, std::move(description)};
}

ParamSchema optional_param(std::string name, ParamType type, std::optional<std::string> def, std::string description,
                           std::vector<std::string> choices = {}) {
  return {std::move(name), type, false, std::move(def), std::move(choices), std::move(description)};
}

std::vector<ParamSchema> sms_params() {
  return {param("gateway", ParamType::gateway, "\"loopback\", \"loopback:<name>\" or \"tcp://host:port\""),
          param("own_number", ParamType::user_id, "number the device answers on"),
          optional_param("recipient", ParamType::user_id, std::nullopt, "where outbound text is sent")};
}

std::string text_of(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw Error(Errc::ParseFailure, "param values must be strings, numbers or booleans");
}

std::filesystem::path resolve(const BuildContext& ctx, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : ctx.base_dir / path;
}

std::int64_t to_int(const ComponentSpec& spec, const std::string& name, const std::string& text) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) invalid(spec, "param '" + name + "' must be an integer");
  return v;
}

UserId to_user(const ComponentSpec& spec, const std::string& name, const std::string& text) {
  try {
    return UserId(text);
  } catch (const Error& e) {
    invalid(spec, "param '" + name + "': " + e.what());
  }
}

}  // namespace

std::string_view to_string(ParamType type) noexcept {
  switch (type) {
    case ParamType::string: return "string";
    case ParamType::integer: return "integer";
    case ParamType::user_id: return "user_id";
    case ParamType::path: return "path";
    case ParamType::gateway: return "gateway";
    case ParamType::choice: return "choice";
  }
  return "?";
}

AssemblySpecDoc parse_assembly_spec(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    if (!j.is_object()) throw Error(Errc::ParseFailure, "assembly spec must be a JSON object");
    if (!j.at("components").is_array()) throw Error(Errc::ParseFailure, "components must be an array");
    if (j.contains("connections") && !j.at("connections").is_array()) {
      throw Error(Errc::ParseFailure, "connections must be an array");
    }
    AssemblySpecDoc doc;
    for (const auto& c : j.at("components")) {
      ComponentSpec spec;
      spec.id = c.at("id").get<std::string>();
      spec.catalog_kind = c.at("catalog_kind").get<std::string>();
      if (c.contains("params")) {
        if (!c.at("params").is_object()) throw Error(Errc::ParseFailure, "params must be an object");
        for (const auto& [k, v] : c.at("params").items()) spec.params[k] = text_of(v);
      }
      doc.components.push_back(std::move(spec));
    }
    if (j.contains("connections")) {
      for (const auto& c : j.at("connections")) {
        doc.connections.push_back({c.at("from").get<std::string>(), c.at("to").get<std::string>()});
      }
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseFailure, fmt::format("assembly spec: {}", e.what()));
  }
}

std::string assembly_spec_to_json(const AssemblySpecDoc& doc) {
  ordered_json components = ordered_json::array(), connections = ordered_json::array();
  for (const auto& c : doc.components) {
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : c.params) params[k] = v;
    components.push_back({{"id", c.id}, {"catalog_kind", c.catalog_kind}, {"params", params}});
  }
  for (const auto& c : doc.connections) connections.push_back({{"from", c.from}, {"to", c.to}});
  return ordered_json{{"components", components}, {"connections", connections}}.dump();
}

ComponentCatalog::ComponentCatalog() {
  const PortSchema record_plug{PortDirection::plug, EventKind::record};
  const PortSchema record_socket{PortDirection::socket, EventKind::record};
  const PortSchema text_plug{PortDirection::plug, EventKind::text};
  const PortSchema text_socket{PortDirection::socket, EventKind::text};

  entries_.push_back({"event_bus", "Delivers every event to all registrants, in registration order.", {},
                      {record_plug, record_socket}, std::nullopt, {}});
  entries_.push_back({"gps_source",
                      "Replays a GPS trace as location events.",
                      {param("trace", ParamType::path, "trace file (JSON lines or NMEA GGA)"),
                       param("user", ParamType::user_id, "user the fixes belong to"),
                       optional_param("interval_ms", ParamType::integer, "1000", "spacing between fixes"),
                       optional_param("clock", ParamType::choice, "simulated", "timestamp source",
                                      {"simulated", "live"})},
                      {record_socket},
                      std::nullopt,
                      {}});
  entries_.push_back({"sms_device", "Sends text as SMS segments and emits reassembled inbound text.", sms_params(),
                      {text_plug, text_socket}, std::nullopt, {}});
  entries_.push_back({"sms_xml_device", "An sms_device that only emits well-formed location event documents.",
                      sms_params(), {text_plug, text_socket}, std::nullopt, {}});
  entries_.push_back({"xml_codec_adapter",
                      "Converts between location event records and their XML text.",
                      {param("direction", ParamType::choice, "record_to_text or text_to_record"),
                       optional_param("codec", ParamType::string, std::string(transport::kLocationCodecName), "codec name")},
                      {},
                      "direction",
                      {{"record_to_text", {record_plug, text_socket}}, {"text_to_record", {text_plug, record_socket}}}});
  entries_.back().params[0].choices = {"record_to_text", "text_to_record"};
  entries_.push_back({"file_sink", "Writes each text event to its own date-stamped file.",
                      {param("directory", ParamType::path, "output directory (created if missing)")}, {text_plug},
                      std::nullopt, {}});
}

const CatalogEntry* ComponentCatalog::find(std::string_view kind) const noexcept {
  for (const auto& e : entries_) {
    if (e.kind == kind) return &e;
  }
  return nullptr;
}

std::string ComponentCatalog::to_json() const {
  auto ports_json = [](const std::vector<PortSchema>& ports) {
    ordered_json out{{"plugs", ordered_json::array()}, {"sockets", ordered_json::array()}};
    for (const auto& p : ports) {
      out[p.direction == PortDirection::plug ? "plugs" : "sockets"].push_back(pipeline::to_string(p.kind));
    }
    return out;
  };
  ordered_json out = ordered_json::array();
  for (const auto& e : entries_) {
    ordered_json params = ordered_json::array();
    for (const auto& p : e.params) {
      ordered_json pj{{"name", p.name}, {"type", to_string(p.type)}, {"required", p.required}};
      if (p.default_value) pj["default"] = *p.default_value;
      if (!p.choices.empty()) pj["choices"] = p.choices;
      pj["description"] = p.description;
      params.push_back(std::move(pj));
    }
    ordered_json entry{{"kind", e.kind}, {"description", e.description}, {"params", params}};
    if (e.ports_param) {
      ordered_json variants = ordered_json::object();
      for (const auto& [value, ports] : e.port_variants) variants[value] = ports_json(ports);
      entry["ports_param"] = *e.ports_param;
      entry["port_variants"] = variants;
    } else {
      entry["ports"] = ports_json(e.ports);
    }
    out.push_back(std::move(entry));
  }
  return ordered_json{{"components", out}}.dump();
}

std::unique_ptr<pipeline::Component> ComponentCatalog::instantiate(const ComponentSpec& spec,
                                                                   const BuildContext& ctx) const {
  const CatalogEntry* entry = find(spec.catalog_kind);
  if (entry == nullptr) {
    throw Error(Errc::UnknownCatalogKind, fmt::format("{}: unknown catalog kind '{}'", spec.id, spec.catalog_kind));
  }
  if (spec.id.empty()) invalid(spec, "component id must not be empty");
  for (const auto& [name, value] : spec.params) {
    const bool known =
        std::any_of(entry->params.begin(), entry->params.end(), [&](const ParamSchema& p) { return p.name == name; });
    if (!known) invalid(spec, "unknown param '" + name + "' for " + entry->kind);
  }
  std::map<std::string, std::string> values;
  for (const auto& p : entry->params) {
    const auto it = spec.params.find(p.name);
    if (it != spec.params.end()) {
      values[p.name] = it->second;
    } else if (p.required) {
      throw Error(Errc::MissingParam, fmt::format("{}: {} needs param '{}'", spec.id, entry->kind, p.name));
    } else if (p.default_value) {
      values[p.name] = *p.default_value;
    }
    if (p.type == ParamType::choice && values.count(p.name) &&
        std::find(p.choices.begin(), p.choices.end(), values[p.name]) == p.choices.end()) {
      invalid(spec, "param '" + p.name + "' must be one of " + fmt::format("{}", fmt::join(p.choices, ", ")));
    }
  }
  auto gateway = [&]() -> std::shared_ptr<transport::SmsGateway> {
    if (ctx.gateways == nullptr) invalid(spec, "no gateway registry available");
    return ctx.gateways->resolve(values.at("gateway"));
  };

  const std::string& kind = entry->kind;
  if (kind == "event_bus") return std::make_unique<pipeline::EventBus>(spec.id);
  if (kind == "gps_source") {
    const auto interval = to_int(spec, "interval_ms", values.at("interval_ms"));
    if (interval <= 0) invalid(spec, "param 'interval_ms' must be positive");
    const UserId user = to_user(spec, "user", values.at("user"));
    std::vector<GpsFix> trace;
    try {
      trace = transport::load_gps_trace(resolve(ctx, values.at("trace")));
    } catch (const Error& e) {
      invalid(spec, std::string("param 'trace': ") + e.what());
    }
    const auto mode = values.at("clock") == "live" ? transport::ClockMode::live : transport::ClockMode::simulated;
    return std::make_unique<transport::GpsSource>(spec.id, std::move(trace), std::chrono::milliseconds(interval), user,
                                                  mode);
  }
  if (kind == "sms_device" || kind == "sms_xml_device") {
    transport::SmsDevice::Options o{nullptr, to_user(spec, "own_number", values.at("own_number")), std::nullopt,
                                    kind == "sms_xml_device"};
    if (values.count("recipient")) o.recipient = to_user(spec, "recipient", values.at("recipient"));
    o.gateway = gateway();
    return std::make_unique<transport::SmsDevice>(spec.id, std::move(o));
  }
  if (kind == "xml_codec_adapter") {
    const auto direction = pipeline::parse_adapt_direction(values.at("direction"));
    const auto codecs = transport::standard_codecs();
    const pipeline::Codec* codec = codecs.find(values.at("codec"));
    if (codec == nullptr) invalid(spec, "unknown codec '" + values.at("codec") + "'");
    return std::make_unique<pipeline::CodecAdapter>(spec.id, *direction, *codec);
  }
  if (kind == "file_sink") {
    const auto dir = resolve(ctx, values.at("directory"));
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    try {
      return std::make_unique<transport::FileSink>(spec.id, dir);
    } catch (const Error& e) {
      invalid(spec, std::string("param 'directory': ") + e.what());
    }
  }
  throw Error(Errc::UnknownCatalogKind, "no factory for '" + kind + "'");
}

std::unique_ptr<pipeline::Assembly> ComponentCatalog::build(const std::string& assembly_id, const AssemblySpecDoc& doc,
                                                            const BuildContext& ctx) const {
  auto assembly = std::make_unique<pipeline::Assembly>(assembly_id);
  std::set<std::string> ids;
  for (const auto& c : doc.components) {
    if (!ids.insert(c.id).second) throw Error(Errc::DuplicateComponent, "duplicate component id '" + c.id + "'");
    assembly->add(instantiate(c, ctx));
  }
  for (const auto& c : doc.connections) assembly->connect(c.from, c.to);
  return assembly;
}

}  // namespace gloss::catalog
