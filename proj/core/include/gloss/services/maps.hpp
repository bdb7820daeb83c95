#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gloss/transport/types.hpp"

namespace gloss::services {

struct PixelPoint {
  double x;
  double y;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

/// (south, west, north, east) in degrees.
struct BoundingBox {
  double south;
  double west;
  double north;
  double east;
};

/// A static map image with a linear (equirectangular) pixel <-> lat/lon
/// mapping. Pixel (0, 0) is the north-west corner. A map whose west edge is
/// numerically east of its east edge spans the antimeridian.
class MapCalibration {
 public:
  /// Throws RangeViolation on inconsistent bounds or empty dimensions.
  MapCalibration(std::string image_id, int pixel_width, int pixel_height, double north_lat, double south_lat,
                 double west_lon, double east_lon);

  const std::string& image_id() const noexcept { return image_id_; }
  int pixel_width() const noexcept { return width_; }
  int pixel_height() const noexcept { return height_; }
  double north_lat() const noexcept { return north_; }
  double south_lat() const noexcept { return south_; }
  double west_lon() const noexcept { return west_; }
  double east_lon() const noexcept { return east_; }

  bool contains(const LatLongCoordinate& p) const noexcept;
  bool contains(const BoundingBox& box) const noexcept;
  /// Spherical area of the covered region, square meters.
  double area_m2() const noexcept;

  /// Unclamped linear projection.
  PixelPoint project(const LatLongCoordinate& p) const noexcept;
  /// Projection clamped to [0, width] x [0, height].
  PixelPoint place(const LatLongCoordinate& p) const noexcept;
  LatLongCoordinate unproject(const PixelPoint& px) const;

 private:
  double lon_span() const noexcept;
  double lon_offset(double lon) const noexcept;

  std::string image_id_;
  int width_;
  int height_;
  double north_;
  double south_;
  double west_;
  double east_;
};

std::vector<MapCalibration> parse_maps(std::string_view jsonl, std::string_view source = "maps");
std::vector<MapCalibration> load_maps(const std::filesystem::path& path);

/// The smallest-area map containing the point, if any.
const MapCalibration* best_map_for(const std::vector<MapCalibration>& maps, const LatLongCoordinate& p);
/// The smallest-area map containing the box, else the largest map, else none.
const MapCalibration* best_map_for(const std::vector<MapCalibration>& maps, const BoundingBox& box);

}  // namespace gloss::services
