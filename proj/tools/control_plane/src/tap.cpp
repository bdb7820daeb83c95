#include "gloss/control/tap.hpp"

#include <chrono>

#include "gloss/transport/xml_codec.hpp"

namespace gloss::control {

std::string preview_of(const pipeline::Event& event) {
  std::string text;
  if (event.kind() == pipeline::EventKind::text) {
    text = event.text();
  } else if (const auto* loc = event.record_if<LocationEvent>()) {
    text = transport::xml_encode(*loc);
  } else {
    text = std::string("<record ") + event.record_type().name() + ">";
  }
  if (text.size() > kPreviewLimit) text.resize(kPreviewLimit);
  return text;
}

EventTap::EventTap(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

void EventTap::record(const std::string& component, const pipeline::Event& event) {
  const auto now = std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
  TapEntry entry{0, now, component, std::string(pipeline::to_string(event.kind())), preview_of(event)};
  {
    std::lock_guard lock(mutex_);
    entry.seq = next_seq_++;
    ring_.push_back(std::move(entry));
    while (ring_.size() > capacity_) ring_.pop_front();
  }
  cv_.notify_all();
}

std::vector<TapEntry> EventTap::snapshot() const {
  std::lock_guard lock(mutex_);
  return {ring_.begin(), ring_.end()};
}

EventTap::Read EventTap::wait_from(std::uint64_t from, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || next_seq_ > from; });
  Read out{{}, closed_};
  for (const auto& e : ring_) {
    if (e.seq >= from) out.entries.push_back(e);
  }
  return out;
}

void EventTap::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

void EventTap::reopen() {
  std::lock_guard lock(mutex_);
  closed_ = false;
}

bool EventTap::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

}  // namespace gloss::control
