#include "gloss/transport/file_sink.hpp"

#include <fmt/format.h>
#include <fstream>

#include "gloss/error.hpp"

namespace gloss::transport {

namespace fs = std::filesystem;

namespace {
std::atomic<std::uint64_t> g_sequence{0};
}

std::string date_stamped_filename(Timestamp t, std::uint64_t sequence) {
  return fmt::format("{}-{:04}.xml", format_compact_timestamp(t), sequence);
}

std::uint64_t next_file_sequence() noexcept { return g_sequence.fetch_add(1) + 1; }

FileSink::FileSink(std::string id, fs::path directory, Clock clock)
    : Component(std::move(id), "file_sink"), directory_(std::move(directory)), clock_(std::move(clock)) {
  std::error_code ec;
  if (!fs::is_directory(directory_, ec)) {
    throw Error(Errc::IoFailure, "sink directory '" + directory_.string() + "' does not exist");
  }
  if (!clock_) {
    clock_ = [] { return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now()); };
  }
  add_plug(pipeline::EventKind::text);
}

void FileSink::put(const pipeline::Event& event) {
  // Never step backwards, so names sort in write order even if the clock does.
  last_ = std::max(last_, clock_());
  const std::string name = date_stamped_filename(last_, next_file_sequence());
  const fs::path final_path = directory_ / name;
  const fs::path temp_path = directory_ / ("." + name + ".tmp");
  const std::string& payload = event.text();
  {
    std::ofstream out(temp_path, std::ios::binary | std::ios::trunc);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.close();
    if (!out) {
      std::error_code ignore;
      fs::remove(temp_path, ignore);
      report("IoFailure: cannot write " + temp_path.string() + "; event dropped");
      return;
    }
  }
  std::error_code ec;
  fs::rename(temp_path, final_path, ec);
  if (ec) {
    fs::remove(temp_path, ec);
    report("IoFailure: cannot rename into " + final_path.string() + "; event dropped");
    return;
  }
  ++written_;
}

}  // namespace gloss::transport
