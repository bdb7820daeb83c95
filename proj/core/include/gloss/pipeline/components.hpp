#pragma once

#include "gloss/pipeline/codec.hpp"
#include "gloss/pipeline/component.hpp"

namespace gloss::pipeline {

/// RECORD plug + RECORD socket; every event received is delivered to all
/// registrants exactly once, in registration order.
class EventBus final : public Component {
 public:
  explicit EventBus(std::string id);
  void put(const Event& event) override;
};

/// Converts between TEXT and RECORD using a codec. Undecodable input is
/// dropped with a diagnostic.
class CodecAdapter final : public Component {
 public:
  CodecAdapter(std::string id, AdaptDirection direction, Codec codec);

  AdaptDirection direction() const noexcept { return direction_; }
  const std::string& codec_name() const noexcept { return codec_.name; }

  void put(const Event& event) override;

 private:
  AdaptDirection direction_;
  Codec codec_;
};

/// Test/inspection sink: records everything it receives.
class Collector final : public Component {
 public:
  Collector(std::string id, EventKind kind);
  void put(const Event& event) override;
  const std::vector<Event>& received() const noexcept { return received_; }

 private:
  std::vector<Event> received_;
};

/// Passes events of one kind straight through.
class Relay final : public Component {
 public:
  Relay(std::string id, EventKind kind);
  void put(const Event& event) override;
};

}  // namespace gloss::pipeline
