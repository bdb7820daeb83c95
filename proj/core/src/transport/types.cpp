#include "gloss/transport/types.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>

#include "gloss/error.hpp"

namespace gloss {

namespace {

struct Civil {
  int year;
  unsigned month, day, hour, minute, second, millis;
};

Civil to_civil(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  return {int(ymd.year()),
          unsigned(ymd.month()),
          unsigned(ymd.day()),
          unsigned(hms.hours().count()),
          unsigned(hms.minutes().count()),
          unsigned(hms.seconds().count()),
          unsigned(hms.subseconds().count())};
}

bool read_uint(std::string_view text, std::size_t pos, std::size_t width, unsigned& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto r = std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return r.ec == std::errc{};
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  throw Error(Errc::ParseFailure, "invalid ISO-8601 UTC timestamp '" + std::string(text) + "'");
}

}  // namespace

std::string format_timestamp(Timestamp t) {
  const Civil c = to_civil(t);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", c.year, c.month, c.day, c.hour, c.minute,
                     c.second, c.millis);
}

std::string format_compact_timestamp(Timestamp t) {
  const Civil c = to_civil(t);
  return fmt::format("{:04}{:02}{:02}-{:02}{:02}{:02}.{:03}", c.year, c.month, c.day, c.hour, c.minute, c.second,
                     c.millis);
}

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  unsigned y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (text.size() < 20 || !read_uint(text, 0, 4, y) || text[4] != '-' || !read_uint(text, 5, 2, mo) ||
      text[7] != '-' || !read_uint(text, 8, 2, d) || text[10] != 'T' || !read_uint(text, 11, 2, h) ||
      text[13] != ':' || !read_uint(text, 14, 2, mi) || text[16] != ':' || !read_uint(text, 17, 2, s)) {
    bad_timestamp(text);
  }
  std::size_t pos = 19;
  unsigned millis = 0;
  if (text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits == 3) bad_timestamp(text);
      millis = millis * 10 + unsigned(text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) bad_timestamp(text);
    for (; digits < 3; ++digits) millis *= 10;
  }
  if (pos + 1 != text.size() || text[pos] != 'Z') bad_timestamp(text);
  const year_month_day ymd{year{int(y)}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) bad_timestamp(text);
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{millis};
}

LatLongCoordinate::LatLongCoordinate(double lat, double lon) : lat_(lat), lon_(lon) {
  if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0) {
    throw Error(Errc::RangeViolation, fmt::format("latitude {} outside [-90, 90]", lat));
  }
  if (!std::isfinite(lon) || lon < -180.0 || lon > 180.0) {
    throw Error(Errc::RangeViolation, fmt::format("longitude {} outside [-180, 180]", lon));
  }
}

bool UserId::valid(std::string_view text) noexcept {
  if (text.size() < 8 || text.size() > 16 || text.front() != '+') return false;
  for (char c : text.substr(1)) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

UserId::UserId(std::string value) : value_(std::move(value)) {
  if (!valid(value_)) throw Error(Errc::InvalidUserId, "'" + value_ + "' is not + followed by 7-15 digits");
}

LocationEvent make_location_event(UserId user, LatLongCoordinate position, Timestamp timestamp) {
  if (timestamp < Timestamp{}) {
    throw Error(Errc::RangeViolation, "timestamp precedes the Unix epoch");
  }
  return {std::move(user), position, timestamp};
}

}  // namespace gloss
