#include "gloss/control/server.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <deque>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <spdlog/spdlog.h>
#include <sstream>
#include <thread>

#include "gloss/catalog/catalog.hpp"
#include "gloss/control/tap.hpp"
#include "gloss/control/views.hpp"
#include "gloss/error.hpp"
#include "gloss/sim/simulator.hpp"
#include "gloss/store/watcher.hpp"

namespace gloss::control {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kKeptSimulations = 256;

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

bool prefers_html(const httplib::Request& req) {
  const auto accept = req.get_header_value("Accept");
  const auto html = accept.find("text/html");
  if (html == std::string::npos) return false;
  const auto json = accept.find("application/json");
  return json == std::string::npos || html < json;
}

void send(const httplib::Request& req, httplib::Response& res, int status, const Json& body,
          std::string_view title = "gloss") {
  res.status = status;
  if (prefers_html(req)) {
    res.set_content(html_page(title, body), "text/html; charset=utf-8");
  } else {
    res.set_content(dump(body), "application/json");
  }
}

void send_error(const httplib::Request& req, httplib::Response& res, int status, std::string_view code,
                std::string_view message) {
  send(req, res, status, error_body(code, message), "error");
}

/// Runs a handler, turning gloss errors into their HTTP form.
template <class F>
void guarded(const httplib::Request& req, httplib::Response& res, F&& body, int (*status_of)(Errc) = nullptr) {
  try {
    body();
  } catch (const Error& e) {
    const int status = status_of ? status_of(e.code()) : http_status_for(e.code());
    send_error(req, res, status, to_string(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    send_error(req, res, 400, "ParseFailure", e.what());
  }
}

int spec_status(Errc code) noexcept {
  if (code == Errc::ParseFailure) return 400;
  return 422;
}

std::optional<std::string> query(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

std::string require_query(const httplib::Request& req, const char* name) {
  auto v = query(req, name);
  if (!v) throw Error(Errc::MissingParam, fmt::format("query parameter '{}' is required", name));
  return *v;
}

std::string content_type_for(const fs::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

bool safe_name(std::string_view s) {
  if (s.empty() || s.front() == '.') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

struct ManagedAssembly {
  std::string id;
  catalog::AssemblySpecDoc spec;
  std::unique_ptr<pipeline::Assembly> assembly;
  std::shared_ptr<EventTap> tap;
  std::mutex lifecycle;
};

}  // namespace

struct ControlPlane::Impl {
  explicit Impl(ControlPlaneOptions o)
      : options(std::move(o)), store(options.data_dir), services(store, load_maps_if_present(options.data_dir)) {
    load_knowledge_if_present(store, options.data_dir);
    services.attach_to_ingest();
    fs::create_directories(assemblies_dir());
    restore_assemblies();
    if (options.watch_inbox) {
      watcher = std::make_unique<store::Watcher>(store, store.inbox_dir(), options.watch_interval);
      watcher->start();
    }
    routes();
  }

  ~Impl() { shutdown(); }

  fs::path assemblies_dir() const { return options.data_dir / "assemblies"; }

  catalog::BuildContext context() { return {&gateways, options.data_dir}; }

  std::string new_id() {
    std::lock_guard lock(ids_mutex);
    for (;;) {
      auto id = fmt::format("{:08x}", static_cast<std::uint32_t>(rng()));
      std::lock_guard alock(assemblies_mutex);
      if (!assemblies.count(id) && !simulations.count(id)) return id;
    }
  }

  std::shared_ptr<ManagedAssembly> instantiate(const std::string& id, catalog::AssemblySpecDoc spec) {
    auto managed = std::make_shared<ManagedAssembly>();
    managed->id = id;
    managed->assembly = catalog.build(id, spec, context());
    managed->spec = std::move(spec);
    managed->tap = std::make_shared<EventTap>(options.tap_capacity);
    managed->assembly->set_observer(
        [tap = managed->tap](const pipeline::Component& c, const pipeline::Event& e) { tap->record(c.id(), e); });
    return managed;
  }

  void persist(const ManagedAssembly& m) {
    const auto path = assemblies_dir() / (m.id + ".json");
    const auto tmp = assemblies_dir() / ("." + m.id + ".json.tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << dump(Json{{"id", m.id}, {"spec", Json::parse(catalog::assembly_spec_to_json(m.spec))}});
      if (!out) throw Error(Errc::IoFailure, "cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
  }

  void restore_assemblies() {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(assemblies_dir())) {
      const auto name = entry.path().filename().string();
      if (entry.path().extension() == ".json" && name.front() != '.') files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        std::ifstream in(f, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        const auto j = Json::parse(ss.str());
        const auto id = j.at("id").get<std::string>();
        auto managed = instantiate(id, catalog::parse_assembly_spec(j.at("spec").dump()));
        std::lock_guard lock(assemblies_mutex);
        assemblies[id] = std::move(managed);
      } catch (const std::exception& e) {
        spdlog::warn("not restoring {}: {}", f.string(), e.what());
      }
    }
  }

  std::shared_ptr<ManagedAssembly> find_assembly(const std::string& id) {
    std::lock_guard lock(assemblies_mutex);
    const auto it = assemblies.find(id);
    return it == assemblies.end() ? nullptr : it->second;
  }

  Json assembly_json(const ManagedAssembly& m) {
    Json diagnostics = Json::array();
    for (const auto& d : m.assembly->diagnostics()) diagnostics.push_back(d);
    return {{"id", m.id},
            {"state", pipeline::to_string(m.assembly->state())},
            {"spec", Json::parse(catalog::assembly_spec_to_json(m.spec))},
            {"diagnostics", diagnostics}};
  }

  static Json tap_entry_json(const TapEntry& e) {
    return {{"seq", e.seq},
            {"time", format_timestamp(e.time)},
            {"component", e.component},
            {"kind", e.kind},
            {"preview", e.preview}};
  }

  UserId path_user(const httplib::Request& req) { return UserId(req.matches[1].str()); }

  void routes() {
    http.set_payload_max_length(16 * 1024 * 1024);
    http.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "unexpected failure";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      spdlog::error("{} {}: {}", req.method, req.path, what);
      send_error(req, res, 500, "Internal", what);
    });
    http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (res.body.empty()) {
        send_error(req, res, res.status, res.status == 404 ? "NotFound" : "BadRequest",
                   fmt::format("{} {}", req.method, req.path));
      }
      return httplib::Server::HandlerResponse::Handled;
    });

    http.Get("/", [](const httplib::Request& req, httplib::Response& res) {
      send(req, res, 200,
           {{"service", "gloss"},
            {"endpoints",
             {"GET /components", "POST /assemblies", "GET /assemblies", "GET /assemblies/{id}",
              "POST /assemblies/{id}/start", "POST /assemblies/{id}/stop", "DELETE /assemblies/{id}",
              "GET /assemblies/{id}/events", "GET /assemblies/{id}/stream", "GET /users",
              "GET /users/{id}/location", "GET /users/{id}/trail", "GET /users/{id}/radar",
              "GET /users/{id}/hearsay", "GET /smarttown", "POST /simulations", "GET /simulations/{id}/metrics",
              "GET /maps", "GET /maps/{image_id}"}}});
    });

    http.Get("/components", [this](const httplib::Request& req, httplib::Response& res) {
      send(req, res, 200, Json::parse(catalog.to_json()), "components");
    });

    assembly_routes();
    query_routes();
    simulation_routes();
    map_routes();
  }

  void assembly_routes() {
    http.Post("/assemblies", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(
          req, res,
          [&] {
            auto spec = catalog::parse_assembly_spec(req.body);
            const auto id = new_id();
            auto managed = instantiate(id, std::move(spec));
            persist(*managed);
            {
              std::lock_guard lock(assemblies_mutex);
              assemblies[id] = managed;
            }
            send(req, res, 201, {{"id", id}, {"state", pipeline::to_string(managed->assembly->state())}});
          },
          spec_status);
    });

    http.Get("/assemblies", [this](const httplib::Request& req, httplib::Response& res) {
      Json list = Json::array();
      std::vector<std::shared_ptr<ManagedAssembly>> all;
      {
        std::lock_guard lock(assemblies_mutex);
        for (const auto& [_, m] : assemblies) all.push_back(m);
      }
      for (const auto& m : all) list.push_back({{"id", m->id}, {"state", pipeline::to_string(m->assembly->state())}});
      send(req, res, 200, {{"assemblies", list}}, "assemblies");
    });

    http.Get(R"(/assemblies/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto m = find_assembly(req.matches[1]);
      if (!m) return send_error(req, res, 404, "UnknownAssembly", "no assembly " + req.matches[1].str());
      send(req, res, 200, assembly_json(*m), "assembly " + m->id);
    });

    http.Delete(R"(/assemblies/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::shared_ptr<ManagedAssembly> m;
      {
        std::lock_guard lock(assemblies_mutex);
        const auto it = assemblies.find(req.matches[1]);
        if (it != assemblies.end()) {
          m = it->second;
          assemblies.erase(it);
        }
      }
      if (!m) return send_error(req, res, 404, "UnknownAssembly", "no assembly " + req.matches[1].str());
      {
        std::lock_guard lock(m->lifecycle);
        if (m->assembly->state() == pipeline::AssemblyState::running) m->assembly->stop();
        m->tap->close();
      }
      std::error_code ec;
      fs::remove(assemblies_dir() / (m->id + ".json"), ec);
      send(req, res, 200, {{"id", m->id}, {"deleted", true}});
    });

    http.Post(R"(/assemblies/([^/]+)/(start|stop))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto m = find_assembly(req.matches[1]);
      if (!m) return send_error(req, res, 404, "UnknownAssembly", "no assembly " + req.matches[1].str());
      guarded(req, res, [&] {
        std::lock_guard lock(m->lifecycle);
        if (req.matches[2] == "start") {
          m->tap->reopen();
          try {
            m->assembly->start();
          } catch (...) {
            if (m->assembly->state() != pipeline::AssemblyState::running) m->tap->close();
            throw;
          }
        } else {
          m->assembly->stop();
          m->tap->close();
        }
        send(req, res, 200, {{"id", m->id}, {"state", pipeline::to_string(m->assembly->state())}});
      });
    });

    http.Get(R"(/assemblies/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto m = find_assembly(req.matches[1]);
      if (!m) return send_error(req, res, 404, "UnknownAssembly", "no assembly " + req.matches[1].str());
      Json events = Json::array();
      for (const auto& e : m->tap->snapshot()) events.push_back(tap_entry_json(e));
      send(req, res, 200, {{"id", m->id}, {"capacity", m->tap->capacity()}, {"events", events}}, "events");
    });

    http.Get(R"(/assemblies/([^/]+)/stream)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto m = find_assembly(req.matches[1]);
      if (!m) return send_error(req, res, 404, "UnknownAssembly", "no assembly " + req.matches[1].str());
      std::uint64_t from = 0;
      guarded(req, res, [&] {
        if (const auto f = query(req, "from")) from = static_cast<std::uint64_t>(parse_query_number(*f, "from"));
        auto next = std::make_shared<std::uint64_t>(from);
        res.set_chunked_content_provider(
            "application/x-ndjson", [this, tap = m->tap, next](std::size_t, httplib::DataSink& sink) {
              if (stopping.load()) {
                sink.done();
                return true;
              }
              const auto read = tap->wait_from(*next, std::chrono::milliseconds(250));
              for (const auto& e : read.entries) {
                const auto line = dump(tap_entry_json(e)) + "\n";
                if (!sink.write(line.data(), line.size())) return false;
                *next = e.seq + 1;
              }
              if (read.closed) sink.done();
              return true;
            });
      });
    });
  }

  void query_routes() {
    http.Get("/users", [this](const httplib::Request& req, httplib::Response& res) {
      Json users = Json::array();
      for (const auto& u : store.users()) users.push_back(u.str());
      send(req, res, 200, {{"users", users}}, "users");
    });

    http.Get(R"(/users/([^/]+)/location)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        const UserId user = path_user(req);
        const auto loc = services.locate_user(user);
        if (!loc) throw Error(Errc::NoKnownLocation, "no known location for " + user.str());
        send(req, res, 200, location_json(*loc, services), "location of " + user.str());
      });
    });

    http.Get(R"(/users/([^/]+)/trail)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        const UserId user = path_user(req);
        std::optional<Timestamp> from, to;
        if (const auto f = query(req, "from"); f && !f->empty()) from = parse_query_time(*f);
        if (const auto t = query(req, "to"); t && !t->empty()) to = parse_query_time(*t);
        send(req, res, 200, trail_json(user, services.render_trail(user, from, to)), "trail of " + user.str());
      });
    });

    http.Get(R"(/users/([^/]+)/radar)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        const UserId user = path_user(req);
        double radius = 1000;
        if (const auto r = query(req, "radius")) radius = parse_query_number(*r, "radius");
        send(req, res, 200, radar_json(user, services.radar(user, radius)), "radar for " + user.str());
      });
    });

    http.Get(R"(/users/([^/]+)/hearsay)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        const UserId user = path_user(req);
        send(req, res, 200, hearsay_json(user, services.delivered_to(user)), "hearsay for " + user.str());
      });
    });

    http.Get("/smarttown", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(req, res, [&] {
        const double lat = parse_query_number(require_query(req, "lat"), "lat");
        const double lon = parse_query_number(require_query(req, "lon"), "lon");
        const double radius = parse_query_number(require_query(req, "radius"), "radius");
        std::optional<std::string> category = query(req, "category");
        if (category && category->empty()) category.reset();
        const auto result = services.smart_town(LatLongCoordinate(lat, lon), radius, category);
        send(req, res, 200, smart_town_json(result), "smart town");
      });
    });
  }

  void simulation_routes() {
    http.Post("/simulations", [this](const httplib::Request& req, httplib::Response& res) {
      Json body;
      try {
        body = Json::parse(req.body);
      } catch (const nlohmann::json::exception& e) {
        return send_error(req, res, 400, "ParseFailure", e.what());
      }
      guarded(
          req, res,
          [&] {
            if (!body.is_object()) throw Error(Errc::ValidationFailure, "expected a JSON object");
            if (!body.contains("topology") || !body.contains("workload")) {
              return send_error(req, res, 400, "MissingParam", "topology and workload are required");
            }
            const auto topology = sim::parse_topology(body.at("topology").dump());
            const auto workload = sim::parse_workload(body.at("workload").dump());
            const std::uint64_t estimate = workload.size() * (2 * topology.links().size() + 1);
            if (estimate > options.simulation_budget) {
              return send_error(req, res, 413, "PayloadTooLarge",
                                fmt::format("about {} events exceeds the budget of {}", estimate,
                                            options.simulation_budget));
            }
            const auto policy_name = body.value("policy", std::string("flood"));
            const int ttl = body.value("ttl", 4);
            sim::SimOptions so;
            so.seed = body.value("seed", std::uint64_t{0});
            if (body.contains("horizon_ms")) so.horizon_ms = body.at("horizon_ms").get<std::int64_t>();
            const auto policy = sim::make_policy(policy_name, ttl);
            const auto metrics = sim::metrics_to_json(sim::run_simulation(topology, workload, *policy, so).metrics);
            const auto id = new_id();
            {
              std::lock_guard lock(assemblies_mutex);
              simulations[id] = metrics;
              simulation_order.push_back(id);
              while (simulation_order.size() > kKeptSimulations) {
                simulations.erase(simulation_order.front());
                simulation_order.pop_front();
              }
            }
            send(req, res, 201, {{"id", id}, {"metrics", Json::parse(metrics)}});
          },
          spec_status);
    });

    http.Get(R"(/simulations/([^/]+)/metrics)", [this](const httplib::Request& req, httplib::Response& res) {
      std::string metrics;
      {
        std::lock_guard lock(assemblies_mutex);
        const auto it = simulations.find(req.matches[1]);
        if (it != simulations.end()) metrics = it->second;
      }
      if (metrics.empty()) {
        return send_error(req, res, 404, "UnknownSimulation", "no simulation " + req.matches[1].str());
      }
      if (req.get_param_value("format") == "csv") {
        res.set_content(sim::metrics_to_csv(sim::metrics_from_json(metrics)), "text/csv");
        return;
      }
      send(req, res, 200, Json::parse(metrics), "simulation metrics");
    });
  }

  void map_routes() {
    http.Get("/maps", [this](const httplib::Request& req, httplib::Response& res) {
      Json maps = Json::array();
      for (const auto& m : services.maps()) {
        maps.push_back({{"image_id", m.image_id()},
                        {"pixel_width", m.pixel_width()},
                        {"pixel_height", m.pixel_height()},
                        {"north_lat", m.north_lat()},
                        {"south_lat", m.south_lat()},
                        {"west_lon", m.west_lon()},
                        {"east_lon", m.east_lon()}});
      }
      send(req, res, 200, {{"maps", maps}}, "maps");
    });

    http.Get(R"(/maps/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (!safe_name(id)) return send_error(req, res, 400, "InvalidParam", "bad image id");
      const auto dir = options.data_dir / "maps";
      std::error_code ec;
      for (const char* ext : {"", ".png", ".jpg", ".jpeg", ".gif", ".svg"}) {
        const auto p = dir / (id + ext);
        if (!fs::is_regular_file(p, ec)) continue;
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        res.set_content(ss.str(), content_type_for(p));
        return;
      }
      send_error(req, res, 404, "UnknownMap", "no image for map " + id);
    });
  }

  void shutdown() {
    if (stopping.exchange(true)) return;
    std::vector<std::shared_ptr<ManagedAssembly>> all;
    {
      std::lock_guard lock(assemblies_mutex);
      for (const auto& [_, m] : assemblies) all.push_back(m);
    }
    for (const auto& m : all) m->tap->close();
    http.stop();
    if (server_thread.joinable()) server_thread.join();
    for (const auto& m : all) {
      std::lock_guard lock(m->lifecycle);
      if (m->assembly->state() == pipeline::AssemblyState::running) m->assembly->stop();
    }
    if (watcher) watcher->stop();
  }

  ControlPlaneOptions options;
  store::OntologyStore store;
  services::LocationServices services;
  transport::GatewayRegistry gateways;
  catalog::ComponentCatalog catalog;
  std::unique_ptr<store::Watcher> watcher;
  httplib::Server http;
  std::thread server_thread;
  std::atomic<bool> stopping{false};
  bool bound = false;

  std::mutex ids_mutex;
  std::mt19937_64 rng{std::random_device{}()};

  std::mutex assemblies_mutex;
  std::map<std::string, std::shared_ptr<ManagedAssembly>> assemblies;
  std::map<std::string, std::string> simulations;
  std::deque<std::string> simulation_order;
};

ControlPlane::ControlPlane(ControlPlaneOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

ControlPlane::~ControlPlane() = default;

int ControlPlane::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(Errc::IoFailure, fmt::format("cannot listen on {}:{}", host, port));
  impl_->bound = true;
  return bound;
}

void ControlPlane::run() {
  if (!impl_->bound) throw Error(Errc::IoFailure, "control plane is not bound");
  impl_->http.listen_after_bind();
}

void ControlPlane::start_background() {
  if (!impl_->bound) throw Error(Errc::IoFailure, "control plane is not bound");
  impl_->server_thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

void ControlPlane::stop() { impl_->shutdown(); }

store::OntologyStore& ControlPlane::store() { return impl_->store; }
services::LocationServices& ControlPlane::services() { return impl_->services; }
transport::GatewayRegistry& ControlPlane::gateways() { return impl_->gateways; }

}  // namespace gloss::control
