#include "gloss/services/geodesy.hpp"

#include <cmath>
#include <numbers>

#include "gloss/error.hpp"

namespace gloss::services {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double haversine(const LatLongCoordinate& a, const LatLongCoordinate& b) noexcept {
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double dphi = (b.lat() - a.lat()) * kDegToRad;
  const double dlambda = (b.lon() - a.lon()) * kDegToRad;
  const double s1 = std::sin(dphi / 2);
  const double s2 = std::sin(dlambda / 2);
  // Symmetric in (a, b): cos(phi1) * cos(phi2) commutes and s1, s2 are squared.
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

double bearing(const LatLongCoordinate& a, const LatLongCoordinate& b) {
  if (a == b) throw Error(Errc::CoincidentPoints, "bearing between identical points is undefined");
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double dlambda = (b.lon() - a.lon()) * kDegToRad;
  const double y = std::sin(dlambda) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  double deg = std::atan2(y, x) / kDegToRad;
  deg = std::fmod(deg + 360.0, 360.0);
  if (deg >= 360.0) deg = 0.0;
  return deg;
}

double meters_to_lat_degrees(double meters) noexcept { return meters / (kEarthRadiusM * kDegToRad); }

}  // namespace gloss::services
