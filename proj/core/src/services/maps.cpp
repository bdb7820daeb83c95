#include "gloss/services/maps.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "gloss/error.hpp"
#include "gloss/services/geodesy.hpp"

namespace gloss::services {

MapCalibration::MapCalibration(std::string image_id, int pixel_width, int pixel_height, double north_lat,
                               double south_lat, double west_lon, double east_lon)
    : image_id_(std::move(image_id)),
      width_(pixel_width),
      height_(pixel_height),
      north_(north_lat),
      south_(south_lat),
      west_(west_lon),
      east_(east_lon) {
  if (image_id_.empty()) throw Error(Errc::RangeViolation, "map needs an image id");
  if (width_ <= 0 || height_ <= 0) throw Error(Errc::RangeViolation, "map pixel dimensions must be positive");
  for (double v : {north_, south_, west_, east_}) {
    if (!std::isfinite(v)) throw Error(Errc::RangeViolation, "map bounds must be finite");
  }
  if (!(north_ > south_) || north_ > 90 || south_ < -90) {
    throw Error(Errc::RangeViolation, "map needs -90 <= south < north <= 90");
  }
  if (west_ == east_ || west_ < -180 || west_ > 180 || east_ < -180 || east_ > 180) {
    throw Error(Errc::RangeViolation, "map needs distinct west/east within [-180, 180]");
  }
}

double MapCalibration::lon_span() const noexcept { return east_ > west_ ? east_ - west_ : east_ - west_ + 360.0; }

double MapCalibration::lon_offset(double lon) const noexcept {
  double d = lon - west_;
  if (east_ < west_ && d < 0) d += 360.0;
  return d;
}

bool MapCalibration::contains(const LatLongCoordinate& p) const noexcept {
  if (p.lat() < south_ || p.lat() > north_) return false;
  const double d = lon_offset(p.lon());
  return d >= 0 && d <= lon_span();
}

bool MapCalibration::contains(const BoundingBox& box) const noexcept {
  if (box.south < south_ || box.north > north_) return false;
  const double w = lon_offset(box.west);
  const double e = lon_offset(box.east);
  return w >= 0 && e <= lon_span() && w <= e;
}

double MapCalibration::area_m2() const noexcept {
  constexpr double rad = std::numbers::pi / 180.0;
  return kEarthRadiusM * kEarthRadiusM * lon_span() * rad * (std::sin(north_ * rad) - std::sin(south_ * rad));
}

PixelPoint MapCalibration::project(const LatLongCoordinate& p) const noexcept {
  return {lon_offset(p.lon()) / lon_span() * width_, (north_ - p.lat()) / (north_ - south_) * height_};
}

PixelPoint MapCalibration::place(const LatLongCoordinate& p) const noexcept {
  const PixelPoint raw = project(p);
  return {std::clamp(raw.x, 0.0, double(width_)), std::clamp(raw.y, 0.0, double(height_))};
}

LatLongCoordinate MapCalibration::unproject(const PixelPoint& px) const {
  const double lat = north_ - px.y / height_ * (north_ - south_);
  double lon = west_ + px.x / width_ * lon_span();
  if (lon > 180.0) lon -= 360.0;
  return LatLongCoordinate(lat, lon);
}

std::vector<MapCalibration> parse_maps(std::string_view text, std::string_view source) {
  std::vector<MapCalibration> out;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.emplace_back(j.at("image_id").get<std::string>(), j.at("pixel_width").get<int>(),
                       j.at("pixel_height").get<int>(), j.at("north_lat").get<double>(), j.at("south_lat").get<double>(),
                       j.at("west_lon").get<double>(), j.at("east_lon").get<double>());
    } catch (const std::exception& e) {
      throw Error(Errc::ParseFailure, fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
  return out;
}

std::vector<MapCalibration> load_maps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_maps(ss.str(), path.string());
}

const MapCalibration* best_map_for(const std::vector<MapCalibration>& maps, const LatLongCoordinate& p) {
  const MapCalibration* best = nullptr;
  for (const auto& m : maps) {
    if (m.contains(p) && (best == nullptr || m.area_m2() < best->area_m2())) best = &m;
  }
  return best;
}

const MapCalibration* best_map_for(const std::vector<MapCalibration>& maps, const BoundingBox& box) {
  const MapCalibration* best = nullptr;
  for (const auto& m : maps) {
    if (m.contains(box) && (best == nullptr || m.area_m2() < best->area_m2())) best = &m;
  }
  if (best != nullptr) return best;
  for (const auto& m : maps) {
    if (best == nullptr || m.area_m2() > best->area_m2()) best = &m;
  }
  return best;
}

}  // namespace gloss::services
