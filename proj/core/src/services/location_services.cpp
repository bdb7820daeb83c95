#include "gloss/services/location_services.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "gloss/error.hpp"
#include "gloss/services/geodesy.hpp"

namespace gloss::services {

namespace {

constexpr double kMinHalfSpanM = 100.0;

void require_positive_radius(double radius_m) {
  if (!(radius_m > 0) || !std::isfinite(radius_m)) throw Error(Errc::InvalidParam, "radius must be positive");
}

}  // namespace

std::string_view to_string(RadarKind kind) noexcept {
  switch (kind) {
    case RadarKind::landmark: return "LANDMARK";
    case RadarKind::facility: return "FACILITY";
    case RadarKind::user: return "USER";
  }
  return "?";
}

BoundingBox trail_bbox(const std::vector<LatLongCoordinate>& points) {
  if (points.empty()) throw Error(Errc::EmptyTrail, "no points");
  double s = points.front().lat(), n = s, w = points.front().lon(), e = w;
  for (const auto& p : points) {
    s = std::min(s, p.lat());
    n = std::max(n, p.lat());
    w = std::min(w, p.lon());
    e = std::max(e, p.lon());
  }
  const double pad_lat = (n - s) * 0.1, pad_lon = (e - w) * 0.1;
  s -= pad_lat;
  n += pad_lat;
  w -= pad_lon;
  e += pad_lon;

  const double mid_lat = (s + n) / 2, mid_lon = (w + e) / 2;
  const double min_lat_half = meters_to_lat_degrees(kMinHalfSpanM);
  const double cos_lat = std::max(std::cos(mid_lat * std::numbers::pi / 180.0), 1e-9);
  const double min_lon_half = min_lat_half / cos_lat;
  if ((n - s) / 2 < min_lat_half) {
    s = mid_lat - min_lat_half;
    n = mid_lat + min_lat_half;
  }
  if ((e - w) / 2 < min_lon_half) {
    w = mid_lon - min_lon_half;
    e = mid_lon + min_lon_half;
  }
  return {std::max(s, -90.0), std::max(w, -180.0), std::min(n, 90.0), std::min(e, 180.0)};
}

LocationServices::LocationServices(store::OntologyStore& store, std::vector<MapCalibration> maps)
    : store_(store), maps_(std::move(maps)) {}

const MapCalibration* LocationServices::find_map(std::string_view image_id) const {
  for (const auto& m : maps_) {
    if (m.image_id() == image_id) return &m;
  }
  return nullptr;
}

std::optional<UserLocation> LocationServices::locate_user(const UserId& user) const {
  auto latest = store_.latest_location(user);
  if (!latest) return std::nullopt;
  UserLocation out{*latest, std::nullopt};
  if (const auto* m = best_map_for(maps_, latest->position)) {
    out.placement = MapPlacement{m->image_id(), m->place(latest->position)};
  }
  return out;
}

TrailView LocationServices::render_trail(const UserId& user, std::optional<Timestamp> from,
                                         std::optional<Timestamp> to) const {
  TrailView view;
  view.events = store_.trail(user, from, to);
  if (view.events.empty()) throw Error(Errc::EmptyTrail, "no known locations for " + user.str() + " in range");
  std::vector<LatLongCoordinate> coords;
  coords.reserve(view.events.size());
  for (const auto& e : view.events) coords.push_back(e.position);
  view.bbox = trail_bbox(coords);
  if (const auto* m = best_map_for(maps_, view.bbox)) {
    view.map = *m;
    view.points.reserve(coords.size());
    for (const auto& c : coords) view.points.push_back(m->place(c));
  }
  return view;
}

SmartTownResult LocationServices::smart_town(const LatLongCoordinate& position, double radius_m,
                                             const std::optional<std::string>& category) const {
  require_positive_radius(radius_m);
  const auto knowledge = store_.knowledge();
  SmartTownResult result;
  for (const auto& f : knowledge->facilities) {
    if (category && f.category != *category) continue;
    const double d = haversine(position, f.position);
    if (d <= radius_m) result.entries.push_back({f, d, std::nullopt, std::nullopt});
  }
  std::sort(result.entries.begin(), result.entries.end(), [](const SmartTownEntry& a, const SmartTownEntry& b) {
    return std::tie(a.distance_m, a.facility.id) < std::tie(b.distance_m, b.facility.id);
  });
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    if (i > 0) result.entries[i].previous = result.entries[i - 1].facility.id;
    if (i + 1 < result.entries.size()) result.entries[i].next = result.entries[i + 1].facility.id;
  }
  return result;
}

std::vector<store::Hearsay> LocationServices::hearsay_check(const LocationEvent& event) {
  const auto knowledge = store_.knowledge();
  std::vector<store::Hearsay> now;
  for (const auto& h : knowledge->hearsay) {
    if (!h.audience.admits(event.user)) continue;
    if (haversine(event.position, h.region_center) > h.region_radius_m) continue;
    if (store_.mark_delivered(event.user, h.id)) now.push_back(h);
  }
  if (!now.empty()) {
    std::lock_guard lock(inbox_mutex_);
    auto& box = inbox_[event.user.str()];
    box.insert(box.end(), now.begin(), now.end());
  }
  return now;
}

std::vector<store::Hearsay> LocationServices::delivered_to(const UserId& user) const {
  std::lock_guard lock(inbox_mutex_);
  const auto it = inbox_.find(user.str());
  return it == inbox_.end() ? std::vector<store::Hearsay>{} : it->second;
}

void LocationServices::attach_to_ingest() {
  store_.add_listener([this](const LocationEvent& e) { hearsay_check(e); });
}

std::vector<RadarEntry> LocationServices::radar(const UserId& user, double radius_m) const {
  require_positive_radius(radius_m);
  const auto self = store_.latest_location(user);
  if (!self) throw Error(Errc::NoKnownLocation, "no known location for " + user.str());
  const LatLongCoordinate& here = self->position;

  std::vector<RadarEntry> out;
  auto consider = [&](RadarKind kind, const std::string& id, const std::string& name, const LatLongCoordinate& at) {
    const double d = haversine(here, at);
    if (d > radius_m) return;
    out.push_back({kind, id, name, d, here == at ? 0.0 : bearing(here, at)});
  };

  const auto knowledge = store_.knowledge();
  for (const auto& l : knowledge->landmarks) consider(RadarKind::landmark, l.id, l.name, l.position);
  for (const auto& f : knowledge->facilities) consider(RadarKind::facility, f.id, f.name, f.position);
  for (const auto& other : store_.users()) {
    if (other == user || !store_.can_observe(user, other)) continue;
    if (const auto loc = store_.latest_location(other)) {
      consider(RadarKind::user, other.str(), other.str(), loc->position);
    }
  }
  std::sort(out.begin(), out.end(), [](const RadarEntry& a, const RadarEntry& b) {
    return std::tie(a.distance_m, a.kind, a.id) < std::tie(b.distance_m, b.kind, b.id);
  });
  return out;
}

}  // namespace gloss::services
