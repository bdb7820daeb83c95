#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <thread>

#include "gloss/control/server.hpp"
#include "gloss/control/views.hpp"
#include "gloss/error.hpp"
#include "gloss/sim/simulator.hpp"
#include "gloss/store/watcher.hpp"
#include "gloss/transport/assemblies.hpp"
#include "gloss/transport/file_sink.hpp"
#include "gloss/transport/gps.hpp"
#include "gloss/transport/sms_device.hpp"
#include "gloss/transport/tcp_gateway.hpp"

using namespace gloss;
using control::Json;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

void wait_for_signal() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void print(const Json& j) {
  std::cout << j.dump(-1, ' ', false, Json::error_handler_t::replace) << std::endl;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path);
}

int exit_code_for(Errc code) { return code == Errc::IoFailure || code == Errc::GatewayUnreachable ? 2 : 1; }

struct ServeArgs {
  std::optional<std::string> data_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  int poll_ms = 500;
};

int serve(const ServeArgs& a) {
  control::ControlPlaneOptions o;
  o.data_dir = control::resolve_data_dir(a.data_dir);
  o.watch_interval = std::chrono::milliseconds(a.poll_ms);
  control::ControlPlane plane(o);
  const int port = plane.bind(a.host, a.port);
  plane.start_background();
  std::cout << "serving " << o.data_dir.string() << " on http://" << a.host << ":" << port << std::endl;
  wait_for_signal();
  plane.stop();
  return 0;
}

int gateway(const std::string& host, int port) {
  transport::TcpGatewayRelay relay;
  const auto bound = relay.start(static_cast<std::uint16_t>(port), host);
  std::cout << "gateway listening on " << host << ":" << bound << std::endl;
  wait_for_signal();
  relay.stop();
  return 0;
}

struct MobileArgs {
  std::string trace;
  std::string gateway = "loopback";
  std::string user;
  int interval_ms = 1000;
  std::string server_number = transport::kDefaultServerNumber;
  bool live = false;
};

int run_mobile(const MobileArgs& a) {
  transport::GatewayRegistry registry;
  if (a.interval_ms <= 0) throw Error(Errc::InvalidParam, "--interval must be positive");
  transport::MobileAssemblyOptions o{transport::load_gps_trace(a.trace),
                                     std::chrono::milliseconds(a.interval_ms),
                                     UserId(a.user),
                                     registry.resolve(a.gateway),
                                     UserId(a.server_number),
                                     a.live ? transport::ClockMode::live : transport::ClockMode::simulated};
  const auto fixes = o.trace.size();
  auto assembly = transport::build_mobile_assembly(std::move(o));
  auto& gps = static_cast<transport::GpsSource&>(*assembly->find("gps_device"));
  auto& sms = static_cast<transport::SmsDevice&>(*assembly->find("sms_device"));
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  assembly->start();
  while (!gps.finished() && !g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  assembly->stop();
  for (const auto& d : assembly->diagnostics()) spdlog::warn("{}", d);
  print({{"fixes", fixes}, {"emitted", gps.emitted()}, {"segments_sent", sms.segments_sent()}});
  return gps.emitted() == fixes ? 0 : 1;
}

struct ServerArgs {
  std::string gateway = "loopback";
  std::string inbox;
  std::string number = transport::kDefaultServerNumber;
  int expect = 0;
  int timeout_ms = 0;
};

int run_server(const ServerArgs& a) {
  transport::GatewayRegistry registry;
  std::filesystem::create_directories(a.inbox);
  auto assembly = transport::build_server_assembly({registry.resolve(a.gateway), a.inbox, UserId(a.number)});
  auto& sink = static_cast<transport::FileSink&>(*assembly->find("saviour"));
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  assembly->start();
  std::cout << "server listening as " << a.number << ", writing to " << a.inbox << std::endl;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(a.timeout_ms);
  bool timed_out = false;
  while (!g_interrupted) {
    if (a.expect > 0 && sink.files_written() >= static_cast<std::size_t>(a.expect)) break;
    if (a.timeout_ms > 0 && std::chrono::steady_clock::now() >= deadline) {
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  assembly->stop();
  for (const auto& d : assembly->diagnostics()) spdlog::warn("{}", d);
  print({{"files_written", sink.files_written()}});
  if (timed_out && a.expect > 0) {
    std::cerr << "timed out waiting for " << a.expect << " messages" << std::endl;
    return 1;
  }
  return 0;
}

Json report_json(const store::IngestReport& r) {
  return {{"file", r.path.filename().string()}, {"outcome", store::to_string(r.outcome)}, {"reason", r.reason}};
}

struct IngestArgs {
  std::optional<std::string> dir;
  bool once = false;
  bool watch = false;
  int poll_ms = 500;
};

int ingest(const IngestArgs& a) {
  if (a.once == a.watch) throw Error(Errc::InvalidParam, "exactly one of --once or --watch is required");
  const auto dir = control::resolve_data_dir(a.dir);
  store::OntologyStore store(dir);
  control::load_knowledge_if_present(store, dir);
  services::LocationServices services(store, control::load_maps_if_present(dir));
  services.attach_to_ingest();
  store::Watcher watcher(store, store.inbox_dir(), std::chrono::milliseconds(a.poll_ms));
  if (a.once) {
    for (const auto& r : watcher.poll_once()) print(report_json(r));
    return 0;
  }
  watcher.start([](const store::IngestReport& r) { print(report_json(r)); });
  wait_for_signal();
  watcher.stop();
  return 0;
}

struct QueryArgs {
  std::string what;
  std::string user;
  std::optional<std::string> data_dir;
  std::string from;
  std::string to;
  std::optional<double> lat;
  std::optional<double> lon;
  std::optional<double> radius;
  std::string category;
};

int query(const QueryArgs& a) {
  const auto dir = control::resolve_data_dir(a.data_dir);
  store::OntologyStore store(dir);
  control::load_knowledge_if_present(store, dir);
  services::LocationServices services(store, control::load_maps_if_present(dir));

  auto need_user = [&] {
    if (a.user.empty()) throw Error(Errc::MissingParam, "query " + a.what + " needs a user id");
    return UserId(a.user);
  };
  if (a.what == "location") {
    const auto user = need_user();
    const auto loc = services.locate_user(user);
    if (!loc) throw Error(Errc::NoKnownLocation, "no known location for " + user.str());
    print(control::location_json(*loc, services));
  } else if (a.what == "trail") {
    const auto user = need_user();
    std::optional<Timestamp> from, to;
    if (!a.from.empty()) from = control::parse_query_time(a.from);
    if (!a.to.empty()) to = control::parse_query_time(a.to);
    print(control::trail_json(user, services.render_trail(user, from, to)));
  } else if (a.what == "smarttown") {
    if (!a.lat || !a.lon || !a.radius) throw Error(Errc::MissingParam, "smarttown needs --lat, --lon and --radius");
    std::optional<std::string> category;
    if (!a.category.empty()) category = a.category;
    print(control::smart_town_json(services.smart_town(LatLongCoordinate(*a.lat, *a.lon), *a.radius, category)));
  } else if (a.what == "radar") {
    const auto user = need_user();
    print(control::radar_json(user, services.radar(user, a.radius.value_or(1000.0))));
  } else {
    throw Error(Errc::InvalidParam, "unknown query '" + a.what + "'");
  }
  return 0;
}

struct SimulateArgs {
  std::string topology;
  std::string workload;
  std::string policy = "flood";
  int ttl = 4;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> horizon_ms;
  std::string json_out;
  std::string csv_out;
};

int simulate(const SimulateArgs& a) {
  const auto topology = sim::load_topology(a.topology);
  const auto workload = sim::load_workload(a.workload);
  const auto policy = sim::make_policy(a.policy, a.ttl);
  sim::SimOptions o;
  o.seed = a.seed;
  if (a.horizon_ms) o.horizon_ms = *a.horizon_ms;
  const auto metrics = sim::run_simulation(topology, workload, *policy, o).metrics;
  const auto json = sim::metrics_to_json(metrics);
  if (!a.json_out.empty()) write_file(a.json_out, json + "\n");
  if (!a.csv_out.empty()) write_file(a.csv_out, sim::metrics_to_csv(metrics));
  std::cout << json << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("gloss"));

  CLI::App app{"gloss: location-aware assemblies, their server, and an overlay simulator"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP control plane");
  serve_cmd->add_option("--data-dir", serve_args.data_dir, "data directory (default $GLOSS_DATA_DIR or ./gloss-data)");
  serve_cmd->add_option("--host", serve_args.host, "bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve_args.port, "listen port (0 picks one)")->capture_default_str();
  serve_cmd->add_option("--poll-ms", serve_args.poll_ms, "inbox poll interval")->capture_default_str();

  std::string gw_host = "127.0.0.1";
  int gw_port = 7000;
  auto* gateway_cmd = app.add_subcommand("gateway", "run a TCP SMS relay shared by several processes");
  gateway_cmd->add_option("--host", gw_host, "bind address")->capture_default_str();
  gateway_cmd->add_option("--port", gw_port, "listen port (0 picks one)")->capture_default_str();

  MobileArgs mobile;
  auto* mobile_cmd = app.add_subcommand("run-mobile", "replay a GPS trace through the mobile assembly");
  mobile_cmd->add_option("--trace", mobile.trace, "GPS trace file")->required();
  mobile_cmd->add_option("--gateway", mobile.gateway, "loopback, loopback:<name> or tcp://host:port")->required();
  mobile_cmd->add_option("--user", mobile.user, "the device's own number")->required();
  mobile_cmd->add_option("--interval", mobile.interval_ms, "ms between fixes")->capture_default_str();
  mobile_cmd->add_option("--server-number", mobile.server_number, "number of the server")->capture_default_str();
  mobile_cmd->add_flag("--live", mobile.live, "pace fixes on the wall clock");

  ServerArgs server;
  auto* server_cmd = app.add_subcommand("run-server", "receive location SMS and save them as XML files");
  server_cmd->add_option("--gateway", server.gateway, "loopback, loopback:<name> or tcp://host:port")->required();
  server_cmd->add_option("--inbox", server.inbox, "directory for received documents")->required();
  server_cmd->add_option("--number", server.number, "number to answer on")->capture_default_str();
  server_cmd->add_option("--expect", server.expect, "exit after this many documents");
  server_cmd->add_option("--timeout-ms", server.timeout_ms, "give up after this long");

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest", "load XML documents from <dir>/inbox into the store");
  ingest_cmd->add_option("--dir", ingest_args.dir, "data directory");
  ingest_cmd->add_flag("--once", ingest_args.once, "one pass, then exit");
  ingest_cmd->add_flag("--watch", ingest_args.watch, "keep polling until interrupted");
  ingest_cmd->add_option("--poll-ms", ingest_args.poll_ms, "poll interval")->capture_default_str();

  QueryArgs q;
  auto* query_cmd = app.add_subcommand("query", "query the store and print JSON");
  query_cmd->add_option("what", q.what, "location, trail, smarttown or radar")
      ->required()
      ->check(CLI::IsMember({"location", "trail", "smarttown", "radar"}));
  query_cmd->add_option("user", q.user, "user id, e.g. +447700900123");
  query_cmd->add_option("--data-dir", q.data_dir, "data directory");
  query_cmd->add_option("--from", q.from, "trail start (ISO-8601 UTC or epoch ms)");
  query_cmd->add_option("--to", q.to, "trail end");
  query_cmd->add_option("--lat", q.lat, "latitude");
  query_cmd->add_option("--lon", q.lon, "longitude");
  query_cmd->add_option("--radius", q.radius, "meters");
  query_cmd->add_option("--category", q.category, "facility category");

  SimulateArgs s;
  auto* sim_cmd = app.add_subcommand("simulate", "run the overlay simulator");
  sim_cmd->add_option("--topology", s.topology, "topology.json")->required();
  sim_cmd->add_option("--workload", s.workload, "workload.json")->required();
  sim_cmd->add_option("--policy", s.policy, "flood or geo")->capture_default_str();
  sim_cmd->add_option("--ttl", s.ttl, "flood hop limit")->capture_default_str();
  sim_cmd->add_option("--seed", s.seed, "random seed")->capture_default_str();
  sim_cmd->add_option("--horizon-ms", s.horizon_ms, "stop processing after this time");
  sim_cmd->add_option("-o,--output", s.json_out, "write metrics JSON here");
  sim_cmd->add_option("--csv", s.csv_out, "write metrics CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*serve_cmd) return serve(serve_args);
    if (*gateway_cmd) return gateway(gw_host, gw_port);
    if (*mobile_cmd) return run_mobile(mobile);
    if (*server_cmd) return run_server(server);
    if (*ingest_cmd) return ingest(ingest_args);
    if (*query_cmd) return query(q);
    if (*sim_cmd) return simulate(s);
  } catch (const Error& e) {
    std::cerr << "gloss: " << e.what() << std::endl;
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "gloss: " << e.what() << std::endl;
    return 2;
  }
  return 1;
}
