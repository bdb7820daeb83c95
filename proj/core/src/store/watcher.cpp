#include "gloss/store/watcher.hpp"

#include <algorithm>
#include <spdlog/spdlog.h>

#include "gloss/error.hpp"

namespace gloss::store {

namespace fs = std::filesystem;

Watcher::Watcher(OntologyStore& store, fs::path directory, std::chrono::milliseconds poll_interval)
    : store_(store), directory_(std::move(directory)), interval_(poll_interval) {}

Watcher::~Watcher() { stop(); }

std::vector<IngestReport> Watcher::poll_once() {
  ++polls_;
  std::vector<fs::path> files;
  std::error_code ec;
  for (fs::directory_iterator it(directory_, ec), end; !ec && it != end; it.increment(ec)) {
    const auto& p = it->path();
    const auto name = p.filename().string();
    if (name.empty() || name.front() == '.' || p.extension() != ".xml") continue;
    std::error_code type_ec;
    if (fs::is_regular_file(p, type_ec)) files.push_back(p);
  }
  if (ec) spdlog::warn("watcher: cannot list {}: {}", directory_.string(), ec.message());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  std::vector<IngestReport> reports;
  for (const auto& f : files) {
    try {
      reports.push_back(store_.ingest_file(f));
    } catch (const Error& e) {
      spdlog::warn("watcher: {}: {}", f.string(), e.what());
    }
  }
  return reports;
}

void Watcher::start(ReportSink sink) {
  stop();
  {
    std::lock_guard lock(mutex_);
    stop_requested_ = false;
  }
  thread_ = std::thread([this, sink = std::move(sink)] {
    for (;;) {
      for (const auto& r : poll_once()) {
        if (sink) sink(r);
      }
      std::unique_lock lock(mutex_);
      if (cv_.wait_for(lock, interval_, [this] { return stop_requested_; })) return;
    }
  });
}

void Watcher::stop() {
  {
    std::lock_guard lock(mutex_);
    stop_requested_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

}  // namespace gloss::store
