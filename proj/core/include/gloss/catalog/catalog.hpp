#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gloss/pipeline/assembly.hpp"
#include "gloss/transport/gateway.hpp"

namespace gloss::catalog {

enum class ParamType { string, integer, user_id, path, gateway, choice };
std::string_view to_string(ParamType type) noexcept;

struct ParamSchema {
  std::string name;
  ParamType type = ParamType::string;
  bool required = true;
  std::optional<std::string> default_value;
  std::vector<std::string> choices;  ///< for ParamType::choice
  std::string description;
};

struct PortSchema {
  pipeline::PortDirection direction;
  pipeline::EventKind kind;
};

struct CatalogEntry {
  std::string kind;
  std::string description;
  std::vector<ParamSchema> params;
  /// Ports when they do not depend on params.
  std::vector<PortSchema> ports;
  /// For kinds whose ports depend on one param: param name and value -> ports.
  std::optional<std::string> ports_param;
  std::map<std::string, std::vector<PortSchema>> port_variants;
};

struct ComponentSpec {
  std::string id;
  std::string catalog_kind;
  std::map<std::string, std::string> params;

  friend bool operator==(const ComponentSpec&, const ComponentSpec&) = default;
};

struct ConnectionSpec {
  std::string from;
  std::string to;

  friend bool operator==(const ConnectionSpec&, const ConnectionSpec&) = default;
};

struct AssemblySpecDoc {
  std::vector<ComponentSpec> components;
  std::vector<ConnectionSpec> connections;

  friend bool operator==(const AssemblySpecDoc&, const AssemblySpecDoc&) = default;
};

/// Throws ParseFailure. Param values may be JSON strings, numbers or booleans;
/// they are kept as text.
AssemblySpecDoc parse_assembly_spec(std::string_view json);
std::string assembly_spec_to_json(const AssemblySpecDoc& doc);

/// What instantiating components may touch.
struct BuildContext {
  transport::GatewayRegistry* gateways = nullptr;
  /// Relative paths in params resolve against this.
  std::filesystem::path base_dir = ".";
};

/// The palette of instantiable components.
class ComponentCatalog {
 public:
  /// The standard set: event_bus, gps_source, sms_device, sms_xml_device,
  /// xml_codec_adapter, file_sink.
  ComponentCatalog();

  const std::vector<CatalogEntry>& entries() const noexcept { return entries_; }
  const CatalogEntry* find(std::string_view kind) const noexcept;

  /// Machine-readable listing, stable across calls.
  std::string to_json() const;

  /// Instantiates and wires the document. Throws UnknownCatalogKind,
  /// DuplicateComponent, MissingParam, InvalidParam, UnknownComponent,
  /// KindMismatch, AmbiguousPorts or CycleWouldForm; the first problem in
  /// document order wins.
  std::unique_ptr<pipeline::Assembly> build(const std::string& assembly_id, const AssemblySpecDoc& doc,
                                            const BuildContext& context) const;

  /// Creates one component from its spec.
  std::unique_ptr<pipeline::Component> instantiate(const ComponentSpec& spec, const BuildContext& context) const;

 private:
  std::vector<CatalogEntry> entries_;
};

}  // namespace gloss::catalog
