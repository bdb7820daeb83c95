#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace gloss {

/// UTC instant with millisecond precision.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// `2002-09-01T12:00:00.000Z`
std::string format_timestamp(Timestamp t);

/// Accepts `YYYY-MM-DDTHH:MM:SS[.f{1,3}]Z`. Throws ParseFailure.
Timestamp parse_timestamp(std::string_view text);

/// `YYYYMMDD-HHMMSS.mmm`
std::string format_compact_timestamp(Timestamp t);

/// Decimal degrees, range-checked on construction (RangeViolation).
class LatLongCoordinate {
 public:
  LatLongCoordinate(double lat, double lon);

  double lat() const noexcept { return lat_; }
  double lon() const noexcept { return lon_; }

  friend bool operator==(const LatLongCoordinate&, const LatLongCoordinate&) = default;

 private:
  double lat_;
  double lon_;
};

/// Phone-number form identifier: "+" followed by 7 to 15 digits.
class UserId {
 public:
  explicit UserId(std::string value);

  static bool valid(std::string_view text) noexcept;

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const UserId&, const UserId&) = default;

 private:
  std::string value_;
};

struct LocationEvent {
  UserId user;
  LatLongCoordinate position;
  Timestamp timestamp;

  friend bool operator==(const LocationEvent&, const LocationEvent&) = default;
};

/// Throws RangeViolation for timestamps before the Unix epoch.
LocationEvent make_location_event(UserId user, LatLongCoordinate position, Timestamp timestamp);

struct GpsFix {
  LatLongCoordinate position;
  Timestamp fix_time;
};

}  // namespace gloss
