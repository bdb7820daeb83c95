#include "gloss/transport/sms_device.hpp"

#include <mutex>
#include <random>

#include "gloss/error.hpp"
#include "gloss/pipeline/assembly.hpp"
#include "gloss/transport/xml_codec.hpp"

namespace gloss::transport {

namespace {
constexpr std::size_t kCompletedMemory = 4096;
}

// Shared with the gateway handler so a late callback never touches a device
// that has stopped or been destroyed.
struct SmsDevice::Inbox {
  std::recursive_mutex mutex;
  SmsDevice* device = nullptr;
};

SmsDevice::SmsDevice(std::string id, Options options)
    : Component(std::move(id), options.validate_xml ? "sms_xml_device" : "sms_device"),
      options_(std::move(options)),
      inbox_(std::make_shared<Inbox>()),
      next_id_(std::random_device{}()) {
  if (!options_.gateway) throw Error(Errc::InvalidParam, "SMS device needs a gateway");
  add_plug(pipeline::EventKind::text);
  add_socket(pipeline::EventKind::text);
}

SmsDevice::~SmsDevice() { on_stop(); }

void SmsDevice::put(const pipeline::Event& event) {
  if (!options_.recipient) {
    report("no recipient configured; outbound message dropped");
    return;
  }
  const auto segments = sms_split(event.text(), MessageId(next_id_.fetch_add(1)));
  for (const auto& s : segments) {
    options_.gateway->send(SmsEnvelope{options_.own_number.str(), options_.recipient->str(), s});
    ++segments_sent_;
  }
}

void SmsDevice::on_start() {
  {
    std::lock_guard lock(inbox_->mutex);
    inbox_->device = this;
  }
  std::weak_ptr<Inbox> weak = inbox_;
  options_.gateway->attach(options_.own_number.str(), [weak](const SmsEnvelope& envelope) {
    auto inbox = weak.lock();
    if (!inbox) return;
    std::lock_guard lock(inbox->mutex);
    SmsDevice* device = inbox->device;
    if (device == nullptr || device->assembly() == nullptr) return;
    device->assembly()->post([device, envelope] { device->accept(envelope); });
  });
}

void SmsDevice::on_stop() {
  {
    std::lock_guard lock(inbox_->mutex);
    if (inbox_->device == nullptr) return;
    inbox_->device = nullptr;
  }
  options_.gateway->detach(options_.own_number.str());
}

void SmsDevice::accept(const SmsEnvelope& envelope) {
  const MessageKey key{envelope.from, envelope.segment.message_id};
  if (completed_.count(key)) return;
  auto& parts = partial_[key];
  parts.push_back(envelope.segment);

  ReassemblyResult result;
  try {
    result = sms_reassemble(parts);
  } catch (const Error& e) {
    partial_.erase(key);
    ++messages_rejected_;
    report(std::string("discarded inbound message: ") + e.what());
    return;
  }
  auto* message = std::get_if<std::string>(&result);
  if (message == nullptr) return;

  partial_.erase(key);
  completed_.insert(key);
  completed_order_.push_back(key);
  if (completed_order_.size() > kCompletedMemory) {
    completed_.erase(completed_order_.front());
    completed_order_.pop_front();
  }

  if (options_.validate_xml) {
    try {
      xml_decode(*message);
    } catch (const Error& e) {
      ++messages_rejected_;
      report(std::string("inbound message is not a valid location fragment: ") + e.what());
      return;
    }
  }
  ++messages_emitted_;
  emit(pipeline::Event::text(std::move(*message)));
}

}  // namespace gloss::transport
