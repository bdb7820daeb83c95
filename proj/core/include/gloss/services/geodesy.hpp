#pragma once

#include "gloss/transport/types.hpp"

namespace gloss::services {

/// Mean earth radius; the earth is treated as a sphere throughout.
inline constexpr double kEarthRadiusM = 6371008.8;

/// Great-circle distance in meters (haversine form).
double haversine(const LatLongCoordinate& a, const LatLongCoordinate& b) noexcept;

/// Initial great-circle bearing from a to b, degrees in [0, 360), 0 = north,
/// 90 = east. Throws CoincidentPoints when a == b.
double bearing(const LatLongCoordinate& a, const LatLongCoordinate& b);

/// Degrees of latitude spanned by `meters` along a meridian.
double meters_to_lat_degrees(double meters) noexcept;

}  // namespace gloss::services
