#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string_view>
#include <thread>
#include <vector>

#include "gloss/pipeline/component.hpp"
#include "gloss/transport/types.hpp"

namespace gloss::transport {

/// Parses one NMEA GGA sentence (`$GPGGA,hhmmss,ddmm.mmm,N,dddmm.mmm,W,q,...`).
/// GGA carries no date, so the fix lands on `date`. A two-hex-digit checksum
/// is verified when present. Throws ParseFailure.
GpsFix parse_gga(std::string_view sentence, std::chrono::sys_days date = {});

/// JSON lines of `{"lat":..,"lon":..,"time":"<ISO-8601>"}`; lines starting
/// with "$GP" are GGA sentences dated like the preceding fix. Blank lines are
/// skipped. Throws ParseFailure naming the line.
std::vector<GpsFix> parse_gps_trace(std::string_view text);
std::vector<GpsFix> load_gps_trace(const std::filesystem::path& path);

enum class ClockMode {
  simulated,  ///< all fixes emitted at start; timestamps = first fix time + i * interval
  live,       ///< one fix per interval on a timer thread, stamped with the wall clock
};

/// RECORD socket emitting one LocationEvent per trace fix, then going quiet.
class GpsSource final : public pipeline::Component {
 public:
  using Clock = std::function<Timestamp()>;

  GpsSource(std::string id, std::vector<GpsFix> trace, std::chrono::milliseconds interval, UserId user,
            ClockMode mode = ClockMode::simulated, Clock wall_clock = {});
  ~GpsSource() override;

  std::size_t emitted() const noexcept { return emitted_.load(); }
  /// True once every fix of the current run has been emitted.
  bool finished() const noexcept { return finished_.load(); }

 protected:
  void on_start() override;
  void on_stop() override;

 private:
  void emit_fix(std::size_t index, Timestamp when);
  void run_live();

  std::vector<GpsFix> trace_;
  std::chrono::milliseconds interval_;
  UserId user_;
  ClockMode mode_;
  Clock wall_clock_;

  std::atomic<std::size_t> emitted_{0};
  std::atomic<bool> finished_{false};

  std::mutex timer_mutex_;
  std::condition_variable timer_cv_;
  bool stop_requested_ = false;
  std::thread timer_;
};

}  // namespace gloss::transport
