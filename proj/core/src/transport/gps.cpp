#include "gloss/transport/gps.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gloss/error.hpp"
#include "gloss/pipeline/assembly.hpp"

namespace gloss::transport {

namespace {

std::vector<std::string_view> split_fields(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw Error(Errc::ParseFailure, fmt::format("bad {} field '{}'", what, s));
  }
  return v;
}

bool is_hex(char c) { return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'F') || (c >= 'a' && c <= 'f'); }

// ddmm.mmm (or dddmm.mmm) to decimal degrees.
double nmea_degrees(std::string_view field, std::size_t degree_digits, std::string_view what) {
  if (field.size() < degree_digits + 2) throw Error(Errc::ParseFailure, fmt::format("bad {} '{}'", what, field));
  const double degrees = parse_double(field.substr(0, degree_digits), what);
  const double minutes = parse_double(field.substr(degree_digits), what);
  if (minutes >= 60.0) throw Error(Errc::ParseFailure, fmt::format("{} minutes out of range", what));
  return degrees + minutes / 60.0;
}

}  // namespace

GpsFix parse_gga(std::string_view sentence, std::chrono::sys_days date) {
  while (!sentence.empty() && (sentence.back() == '\r' || sentence.back() == '\n')) sentence.remove_suffix(1);
  if (sentence.size() < 7 || sentence[0] != '$' || sentence.substr(3, 3) != "GGA") {
    throw Error(Errc::ParseFailure, "not a GGA sentence");
  }
  std::string_view body = sentence.substr(1);
  if (auto star = body.find('*'); star != std::string_view::npos) {
    std::string_view sum = body.substr(star + 1);
    body = body.substr(0, star);
    if (sum.size() == 2 && is_hex(sum[0]) && is_hex(sum[1])) {
      unsigned char x = 0;
      for (char c : body) x ^= static_cast<unsigned char>(c);
      unsigned expected = 0;
      std::from_chars(sum.data(), sum.data() + 2, expected, 16);
      if (expected != x) throw Error(Errc::ParseFailure, "GGA checksum mismatch");
    }
  }
  const auto f = split_fields(body, ',');
  if (f.size() < 7) throw Error(Errc::ParseFailure, "GGA sentence has too few fields");
  if (f[6].empty() || f[6] == "0") throw Error(Errc::ParseFailure, "GGA reports no fix");

  const std::string_view hhmmss = f[1];
  if (hhmmss.size() < 6) throw Error(Errc::ParseFailure, "bad GGA time");
  const int hh = static_cast<int>(parse_double(hhmmss.substr(0, 2), "hour"));
  const int mm = static_cast<int>(parse_double(hhmmss.substr(2, 2), "minute"));
  const double ss = parse_double(hhmmss.substr(4), "second");
  if (hh > 23 || mm > 59 || ss >= 60.0) throw Error(Errc::ParseFailure, "bad GGA time");

  double lat = nmea_degrees(f[2], 2, "latitude");
  if (f[3] == "S") {
    lat = -lat;
  } else if (f[3] != "N") {
    throw Error(Errc::ParseFailure, "latitude hemisphere must be N or S");
  }
  double lon = nmea_degrees(f[4], 3, "longitude");
  if (f[5] == "W") {
    lon = -lon;
  } else if (f[5] != "E") {
    throw Error(Errc::ParseFailure, "longitude hemisphere must be E or W");
  }

  using namespace std::chrono;
  const auto ms = milliseconds(static_cast<long long>(ss * 1000.0 + 0.5));
  Timestamp when = time_point_cast<milliseconds>(date) + hours(hh) + minutes(mm) + ms;
  try {
    return GpsFix{LatLongCoordinate(lat, lon), when};
  } catch (const Error& e) {
    throw Error(Errc::ParseFailure, e.what());
  }
}

std::vector<GpsFix> parse_gps_trace(std::string_view text) {
  std::vector<GpsFix> fixes;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    try {
      if (line.rfind("$GP", 0) == 0) {
        std::chrono::sys_days date{};
        if (!fixes.empty()) date = std::chrono::floor<std::chrono::days>(fixes.back().fix_time);
        fixes.push_back(parse_gga(line, date));
      } else {
        const auto j = nlohmann::json::parse(line);
        if (!j.is_object() || !j.contains("lat") || !j.contains("lon") || !j.contains("time") ||
            !j["lat"].is_number() || !j["lon"].is_number() || !j["time"].is_string()) {
          throw Error(Errc::ParseFailure, "expected {\"lat\":n,\"lon\":n,\"time\":\"...\"}");
        }
        fixes.push_back(GpsFix{LatLongCoordinate(j["lat"].get<double>(), j["lon"].get<double>()),
                               parse_timestamp(j["time"].get<std::string>())});
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseFailure, fmt::format("trace line {}: {}", line_no, e.what()));
    } catch (const Error& e) {
      throw Error(Errc::ParseFailure, fmt::format("trace line {}: {}", line_no, e.what()));
    }
    if (end == text.size()) break;
  }
  return fixes;
}

std::vector<GpsFix> load_gps_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot read trace '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_gps_trace(ss.str());
}

// ---------------------------------------------------------------------------

GpsSource::GpsSource(std::string id, std::vector<GpsFix> trace, std::chrono::milliseconds interval, UserId user,
                     ClockMode mode, Clock wall_clock)
    : Component(std::move(id), "gps_source"),
      trace_(std::move(trace)),
      interval_(interval),
      user_(std::move(user)),
      mode_(mode),
      wall_clock_(std::move(wall_clock)) {
  if (interval_.count() <= 0) throw Error(Errc::InvalidParam, "GPS interval must be positive");
  if (!wall_clock_) {
    wall_clock_ = [] {
      return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
    };
  }
  add_socket(pipeline::EventKind::record);
}

GpsSource::~GpsSource() { on_stop(); }

void GpsSource::emit_fix(std::size_t index, Timestamp when) {
  emit(pipeline::Event::record(make_location_event(user_, trace_[index].position, when)));
  ++emitted_;
}

void GpsSource::on_start() {
  finished_ = false;
  if (mode_ == ClockMode::simulated) {
    const Timestamp base = trace_.empty() ? Timestamp{} : trace_.front().fix_time;
    for (std::size_t i = 0; i < trace_.size(); ++i) emit_fix(i, base + interval_ * static_cast<long long>(i));
    finished_ = true;
    return;
  }
  on_stop();
  {
    std::lock_guard lock(timer_mutex_);
    stop_requested_ = false;
  }
  timer_ = std::thread([this] { run_live(); });
}

void GpsSource::run_live() {
  for (std::size_t i = 0; i < trace_.size(); ++i) {
    if (i > 0) {
      std::unique_lock lock(timer_mutex_);
      if (timer_cv_.wait_for(lock, interval_, [this] { return stop_requested_; })) return;
    }
    {
      std::lock_guard lock(timer_mutex_);
      if (stop_requested_) return;
    }
    const Timestamp now = wall_clock_();
    assembly()->post([this, i, now] { emit_fix(i, now); });
  }
  finished_ = true;
}

void GpsSource::on_stop() {
  {
    std::lock_guard lock(timer_mutex_);
    stop_requested_ = true;
  }
  timer_cv_.notify_all();
  if (timer_.joinable() && timer_.get_id() != std::this_thread::get_id()) timer_.join();
}

}  // namespace gloss::transport
