#pragma once

#include <atomic>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>

#include "gloss/pipeline/component.hpp"
#include "gloss/transport/gateway.hpp"
#include "gloss/transport/types.hpp"

namespace gloss::transport {

/// SMS-capable device: TEXT events on the plug are segmented and sent through
/// the gateway to `recipient`; segments arriving for `own_number` are
/// reassembled and each complete message is emitted once on the TEXT socket.
///
/// With `validate_xml` set (the "sms_xml_device" kind), inbound messages that
/// are not location-event fragments are dropped with a diagnostic.
class SmsDevice final : public pipeline::Component {
 public:
  struct Options {
    std::shared_ptr<SmsGateway> gateway;
    UserId own_number;
    std::optional<UserId> recipient;
    bool validate_xml = false;
  };

  SmsDevice(std::string id, Options options);
  ~SmsDevice() override;

  /// Send path. Throws GatewayUnreachable.
  void put(const pipeline::Event& event) override;

  std::size_t segments_sent() const noexcept { return segments_sent_.load(); }
  std::size_t messages_emitted() const noexcept { return messages_emitted_.load(); }
  std::size_t messages_rejected() const noexcept { return messages_rejected_.load(); }

 protected:
  void on_start() override;
  void on_stop() override;

 private:
  struct Inbox;
  using MessageKey = std::pair<std::string, MessageId>;

  void accept(const SmsEnvelope& envelope);

  Options options_;
  std::shared_ptr<Inbox> inbox_;
  std::atomic<std::uint32_t> next_id_;

  std::map<MessageKey, std::vector<SmsSegment>> partial_;
  std::set<MessageKey> completed_;
  std::deque<MessageKey> completed_order_;

  std::atomic<std::size_t> segments_sent_{0};
  std::atomic<std::size_t> messages_emitted_{0};
  std::atomic<std::size_t> messages_rejected_{0};
};

}  // namespace gloss::transport
