#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <vector>

#include "gloss/pipeline/event.hpp"
#include "gloss/transport/types.hpp"

namespace gloss::control {

inline constexpr std::size_t kPreviewLimit = 200;

struct TapEntry {
  std::uint64_t seq;
  Timestamp time;
  std::string component;
  std::string kind;
  std::string preview;
};

/// Short human-readable rendering of an event, at most kPreviewLimit chars.
std::string preview_of(const pipeline::Event& event);

/// Ring buffer of the last N events an assembly emitted, with blocking reads
/// for live streaming.
class EventTap {
 public:
  explicit EventTap(std::size_t capacity = 256);

  std::size_t capacity() const noexcept { return capacity_; }
  void record(const std::string& component, const pipeline::Event& event);
  std::vector<TapEntry> snapshot() const;

  struct Read {
    std::vector<TapEntry> entries;
    /// The tap was closed when the entries were taken; nothing follows them.
    bool closed;
  };

  /// Entries with seq >= from, waiting up to `timeout` for one to appear or
  /// for the tap to close.
  Read wait_from(std::uint64_t from, std::chrono::milliseconds timeout) const;

  /// Marks the end of a run; waiting readers wake up.
  void close();
  void reopen();
  bool closed() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  std::deque<TapEntry> ring_;
  std::uint64_t next_seq_ = 0;
  bool closed_ = false;
};

}  // namespace gloss::control
