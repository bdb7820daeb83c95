#pragma once

#include <atomic>
#include <filesystem>
#include <functional>

#include "gloss/pipeline/component.hpp"
#include "gloss/transport/types.hpp"

namespace gloss::transport {

/// `YYYYMMDD-HHMMSS.mmm-NNNN.xml` (UTC).
std::string date_stamped_filename(Timestamp t, std::uint64_t sequence);

/// Next value of the per-process filename sequence (starts at 1).
std::uint64_t next_file_sequence() noexcept;

/// TEXT plug writing each event verbatim to its own date-stamped file. Files
/// are written under a temporary name and renamed into place, so directory
/// watchers only ever see complete files.
class FileSink final : public pipeline::Component {
 public:
  using Clock = std::function<Timestamp()>;

  /// Throws IoFailure if `directory` is not an existing directory.
  FileSink(std::string id, std::filesystem::path directory, Clock clock = {});

  void put(const pipeline::Event& event) override;

  const std::filesystem::path& directory() const noexcept { return directory_; }
  std::size_t files_written() const noexcept { return written_.load(); }

 private:
  std::filesystem::path directory_;
  Clock clock_;
  Timestamp last_{};
  std::atomic<std::size_t> written_{0};
};

}  // namespace gloss::transport
