#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gloss/services/maps.hpp"
#include "gloss/store/ontology_store.hpp"

namespace gloss::services {

struct MapPlacement {
  std::string image_id;
  PixelPoint pixel;
};

struct UserLocation {
  LocationEvent event;
  std::optional<MapPlacement> placement;
};

struct TrailView {
  std::vector<LocationEvent> events;
  BoundingBox bbox;
  std::optional<MapCalibration> map;
  /// One per event, in order; empty when no map is configured.
  std::vector<PixelPoint> points;
};

struct SmartTownEntry {
  store::Facility facility;
  double distance_m;
  std::optional<std::string> previous;  ///< facility id of the entry ranked just before
  std::optional<std::string> next;
};

struct SmartTownResult {
  std::vector<SmartTownEntry> entries;
};

enum class RadarKind { landmark, facility, user };
std::string_view to_string(RadarKind kind) noexcept;

struct RadarEntry {
  RadarKind kind;
  std::string id;
  std::string name;
  double distance_m;
  double bearing_deg;
};

/// Padded bounding box of a trail: 10% of the extent on each side and at
/// least 100 m from the center on each axis.
BoundingBox trail_bbox(const std::vector<LatLongCoordinate>& points);

/// Query layer over an OntologyStore and a set of calibrated maps.
class LocationServices {
 public:
  explicit LocationServices(store::OntologyStore& store, std::vector<MapCalibration> maps = {});

  LocationServices(const LocationServices&) = delete;
  LocationServices& operator=(const LocationServices&) = delete;

  const std::vector<MapCalibration>& maps() const noexcept { return maps_; }
  const MapCalibration* find_map(std::string_view image_id) const;

  std::optional<UserLocation> locate_user(const UserId& user) const;

  /// Throws EmptyTrail when the slice has no events, InvalidRange when from > to.
  TrailView render_trail(const UserId& user, std::optional<Timestamp> from = std::nullopt,
                         std::optional<Timestamp> to = std::nullopt) const;

  /// Throws InvalidParam unless radius_m > 0.
  SmartTownResult smart_town(const LatLongCoordinate& position, double radius_m,
                             const std::optional<std::string>& category = std::nullopt) const;

  /// Delivers every hearsay item whose region holds the event position and
  /// whose audience admits the user, at most once per (user, item) ever.
  std::vector<store::Hearsay> hearsay_check(const LocationEvent& event);

  /// Items delivered to the user by this instance, in delivery order.
  std::vector<store::Hearsay> delivered_to(const UserId& user) const;

  /// Runs hearsay_check on every newly ingested event. Call once.
  void attach_to_ingest();

  /// Throws NoKnownLocation when the user has no fix, InvalidParam unless radius_m > 0.
  std::vector<RadarEntry> radar(const UserId& user, double radius_m) const;

 private:
  store::OntologyStore& store_;
  std::vector<MapCalibration> maps_;
  mutable std::mutex inbox_mutex_;
  std::map<std::string, std::vector<store::Hearsay>> inbox_;
};

}  // namespace gloss::services
