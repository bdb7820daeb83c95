#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "gloss/store/ontology_store.hpp"

namespace gloss::store {

/// Polls a directory and ingests every `*.xml` file that appears, in
/// lexicographic filename order (which is timestamp order for date-stamped
/// sink files). Temporary files (leading '.') are ignored.
class Watcher {
 public:
  using ReportSink = std::function<void(const IngestReport&)>;

  Watcher(OntologyStore& store, std::filesystem::path directory,
          std::chrono::milliseconds poll_interval = std::chrono::milliseconds(500));
  ~Watcher();

  Watcher(const Watcher&) = delete;
  Watcher& operator=(const Watcher&) = delete;

  /// One poll. I/O failures are logged and the file is retried next poll.
  std::vector<IngestReport> poll_once();

  /// Polls on a background thread until stop().
  void start(ReportSink sink = {});
  void stop();

  std::size_t polls() const noexcept { return polls_; }

 private:
  OntologyStore& store_;
  std::filesystem::path directory_;
  std::chrono::milliseconds interval_;
  std::size_t polls_ = 0;

  std::mutex mutex_;
  std::condition_variable cv_;
  bool stop_requested_ = false;
  std::thread thread_;
};

}  // namespace gloss::store
