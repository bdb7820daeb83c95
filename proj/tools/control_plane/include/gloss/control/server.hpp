#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "gloss/services/location_services.hpp"
#include "gloss/store/ontology_store.hpp"
#include "gloss/transport/gateway.hpp"

namespace gloss::control {

struct ControlPlaneOptions {
  /// Store root (inbox/, loaded/, quarantine/), knowledge tables, maps.jsonl,
  /// map images under maps/ and persisted specs under assemblies/.
  std::filesystem::path data_dir = "gloss-data";
  std::size_t tap_capacity = 256;
  /// Simulations whose estimated event count exceeds this are refused (413).
  std::uint64_t simulation_budget = 1'000'000;
  bool watch_inbox = true;
  std::chrono::milliseconds watch_interval{500};
};

/// The HTTP face of a node: component catalog, assembly factory and
/// lifecycle, event taps, location queries and simulator runs.
class ControlPlane {
 public:
  explicit ControlPlane(ControlPlaneOptions options);
  ~ControlPlane();

  ControlPlane(const ControlPlane&) = delete;
  ControlPlane& operator=(const ControlPlane&) = delete;

  /// Binds the listening socket; port 0 picks a free one. Returns the port.
  /// Throws IoFailure.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires bind().
  void run();
  /// run() on a background thread.
  void start_background();
  /// Stops serving and all running assemblies. Idempotent.
  void stop();

  store::OntologyStore& store();
  services::LocationServices& services();
  transport::GatewayRegistry& gateways();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gloss::control
