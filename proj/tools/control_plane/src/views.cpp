#include "gloss/control/views.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "gloss/transport/types.hpp"

namespace gloss::control {

namespace {

Json position_json(const LatLongCoordinate& p) { return {{"lat", p.lat()}, {"lon", p.lon()}}; }

Json map_json(const services::MapCalibration& m) {
  return {{"image_id", m.image_id()},     {"url", "/maps/" + m.image_id()}, {"pixel_width", m.pixel_width()},
          {"pixel_height", m.pixel_height()}, {"north_lat", m.north_lat()},      {"south_lat", m.south_lat()},
          {"west_lon", m.west_lon()},     {"east_lon", m.east_lon()}};
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string scalar_html(const std::string& key, const Json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (key == "previous" || key == "next") return "<a href=\"#" + escape(s) + "\">" + escape(s) + "</a>";
    return escape(s);
  }
  if (v.is_null()) return "";
  return escape(v.dump());
}

void render(const Json& v, std::string& out);

void render_table(const Json& rows, std::string& out) {
  std::vector<std::string> columns;
  for (const auto& row : rows) {
    for (const auto& [k, _] : row.items()) {
      if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
    }
  }
  out += "<table><tr>";
  for (const auto& c : columns) out += "<th>" + escape(c) + "</th>";
  out += "</tr>";
  for (const auto& row : rows) {
    out += row.contains("id") && row["id"].is_string() ? "<tr id=\"" + escape(row["id"].get<std::string>()) + "\">"
                                                         : std::string("<tr>");
    for (const auto& c : columns) {
      out += "<td>";
      if (row.contains(c)) {
        const auto& cell = row[c];
        if (cell.is_structured()) {
          render(cell, out);
        } else {
          out += scalar_html(c, cell);
        }
      }
      out += "</td>";
    }
    out += "</tr>";
  }
  out += "</table>";
}

void render(const Json& v, std::string& out) {
  if (v.is_object()) {
    out += "<dl>";
    for (const auto& [k, child] : v.items()) {
      out += "<dt>" + escape(k) + "</dt><dd>";
      if (child.is_structured()) {
        render(child, out);
      } else {
        out += scalar_html(k, child);
      }
      out += "</dd>";
    }
    out += "</dl>";
  } else if (v.is_array()) {
    const bool objects = !v.empty() && std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_object(); });
    if (objects) {
      render_table(v, out);
    } else if (v.empty()) {
      out += "<p>nothing here</p>";
    } else {
      out += "<ul>";
      for (const auto& e : v) {
        out += "<li>";
        if (e.is_structured()) {
          render(e, out);
        } else {
          out += scalar_html("", e);
        }
        out += "</li>";
      }
      out += "</ul>";
    }
  } else {
    out += scalar_html("", v);
  }
}

}  // namespace

Json error_body(std::string_view code, std::string_view message) {
  return {{"error", std::string(code)}, {"message", std::string(message)}};
}

int http_status_for(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidUserId:
    case Errc::InvalidParam:
    case Errc::MissingParam:
    case Errc::RangeViolation:
    case Errc::ParseFailure:
    case Errc::InvalidRange:
      return 400;
    case Errc::NoKnownLocation:
    case Errc::EmptyTrail:
    case Errc::UnknownHearsay:
      return 404;
    case Errc::InvalidStateTransition:
    case Errc::AssemblyNotEditable:
      return 409;
    default:
      return 422;
  }
}

Json location_json(const services::UserLocation& loc, const services::LocationServices& services) {
  Json out{{"user", loc.event.user.str()},
           {"lat", loc.event.position.lat()},
           {"lon", loc.event.position.lon()},
           {"timestamp", format_timestamp(loc.event.timestamp)},
           {"map", nullptr}};
  if (loc.placement) {
    Json m = map_json(*services.find_map(loc.placement->image_id));
    m["x"] = loc.placement->pixel.x;
    m["y"] = loc.placement->pixel.y;
    out["map"] = std::move(m);
  }
  return out;
}

Json trail_json(const UserId& user, const services::TrailView& trail) {
  Json points = Json::array();
  for (std::size_t i = 0; i < trail.events.size(); ++i) {
    const auto& e = trail.events[i];
    Json p{{"lat", e.position.lat()}, {"lon", e.position.lon()}, {"timestamp", format_timestamp(e.timestamp)}};
    if (i < trail.points.size()) {
      p["x"] = trail.points[i].x;
      p["y"] = trail.points[i].y;
    }
    points.push_back(std::move(p));
  }
  return {{"user", user.str()},
          {"bbox",
           {{"south", trail.bbox.south}, {"west", trail.bbox.west}, {"north", trail.bbox.north}, {"east", trail.bbox.east}}},
          {"map", trail.map ? map_json(*trail.map) : Json(nullptr)},
          {"points", points}};
}

Json smart_town_json(const services::SmartTownResult& result) {
  Json entries = Json::array();
  for (const auto& e : result.entries) {
    entries.push_back({{"id", e.facility.id},
                       {"name", e.facility.name},
                       {"category", e.facility.category},
                       {"lat", e.facility.position.lat()},
                       {"lon", e.facility.position.lon()},
                       {"info", e.facility.info},
                       {"distance_m", e.distance_m},
                       {"previous", e.previous ? Json(*e.previous) : Json(nullptr)},
                       {"next", e.next ? Json(*e.next) : Json(nullptr)}});
  }
  return {{"entries", entries}};
}

Json radar_json(const UserId& user, const std::vector<services::RadarEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries) {
    out.push_back({{"kind", services::to_string(e.kind)},
                   {"id", e.id},
                   {"name", e.name},
                   {"distance_m", e.distance_m},
                   {"bearing_deg", e.bearing_deg}});
  }
  return {{"user", user.str()}, {"entries", out}};
}

Json hearsay_json(const UserId& user, const std::vector<store::Hearsay>& items) {
  Json out = Json::array();
  for (const auto& h : items) {
    out.push_back({{"id", h.id},
                   {"author", h.author.str()},
                   {"message", h.message},
                   {"center", position_json(h.region_center)},
                   {"radius_m", h.region_radius_m}});
  }
  return {{"user", user.str()}, {"hearsay", out}};
}

std::string html_page(std::string_view title, const Json& body) {
  std::string out = "<!doctype html><html><head><meta charset=\"utf-8\"><title>" + escape(title) +
                    "</title><style>body{font-family:sans-serif}table{border-collapse:collapse}"
                    "td,th{border:1px solid #999;padding:2px 6px}</style></head><body><h1>" +
                    escape(title) + "</h1>";
  render(body, out);
  out += "</body></html>";
  return out;
}

Timestamp parse_query_time(std::string_view text) {
  std::int64_t ms = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, ms);
  if (!text.empty() && ec == std::errc{} && ptr == end) return Timestamp(std::chrono::milliseconds(ms));
  return parse_timestamp(text);
}

double parse_query_number(std::string_view text, std::string_view what) {
  double v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw Error(Errc::InvalidParam, std::string(what) + " must be a number");
  }
  return v;
}

void load_knowledge_if_present(store::OntologyStore& store, const std::filesystem::path& dir) {
  const auto files = store::KnowledgeFiles::in_directory(dir);
  if (files.facilities || files.landmarks || files.hearsay || files.visibility) store.load_knowledge(files);
}

std::vector<services::MapCalibration> load_maps_if_present(const std::filesystem::path& dir) {
  const auto path = dir / "maps.jsonl";
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return {};
  return services::load_maps(path);
}

std::filesystem::path resolve_data_dir(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("GLOSS_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return "gloss-data";
}

}  // namespace gloss::control
