#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <vector>

#include "gloss/pipeline/assembly.hpp"
#include "gloss/transport/gateway.hpp"
#include "gloss/transport/gps.hpp"

namespace gloss::transport {

/// Number the server assembly listens on unless told otherwise.
inline constexpr const char* kDefaultServerNumber = "+447700900000";

struct MobileAssemblyOptions {
  std::vector<GpsFix> trace;
  std::chrono::milliseconds interval{1000};
  UserId user;
  std::shared_ptr<SmsGateway> gateway;
  UserId server_number{kDefaultServerNumber};
  ClockMode mode = ClockMode::simulated;
  std::string id = "mobile";
};

/// GPS -> XML generator -> adapter -> event bus -> adapter -> SMS device.
/// The bus is kept even with a single registrant.
std::unique_ptr<pipeline::Assembly> build_mobile_assembly(MobileAssemblyOptions options);

struct ServerAssemblyOptions {
  std::shared_ptr<SmsGateway> gateway;
  std::filesystem::path inbox;
  UserId own_number{kDefaultServerNumber};
  std::string id = "server";
};

/// XML-validating SMS device -> date-stamped file sink.
std::unique_ptr<pipeline::Assembly> build_server_assembly(ServerAssemblyOptions options);

}  // namespace gloss::transport
