#include "gloss/pipeline/components.hpp"

#include <optional>

#include "gloss/error.hpp"

namespace gloss::pipeline {

EventBus::EventBus(std::string id) : Component(std::move(id), "event_bus") {
  add_plug(EventKind::record);
  add_socket(EventKind::record);
}

void EventBus::put(const Event& event) { emit(event); }

CodecAdapter::CodecAdapter(std::string id, AdaptDirection direction, Codec codec)
    : Component(std::move(id), "xml_codec_adapter"), direction_(direction), codec_(std::move(codec)) {
  if (direction_ == AdaptDirection::record_to_text) {
    add_plug(EventKind::record);
    add_socket(EventKind::text);
  } else {
    add_plug(EventKind::text);
    add_socket(EventKind::record);
  }
}

void CodecAdapter::put(const Event& event) {
  std::optional<Event> converted;
  try {
    converted = adapt(event, direction_, codec_);
  } catch (const Error& e) {
    report(std::string("dropped event: ") + e.what());
    return;
  }
  emit(*converted);
}

Collector::Collector(std::string id, EventKind kind) : Component(std::move(id), "collector") { add_plug(kind); }

void Collector::put(const Event& event) { received_.push_back(event); }

Relay::Relay(std::string id, EventKind kind) : Component(std::move(id), "relay") {
  add_plug(kind);
  add_socket(kind);
}

void Relay::put(const Event& event) { emit(event); }

}  // namespace gloss::pipeline
