#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "gloss/transport/sms.hpp"

namespace gloss::transport {

struct SmsEnvelope {
  std::string from;
  std::string to;
  SmsSegment segment;

  friend bool operator==(const SmsEnvelope&, const SmsEnvelope&) = default;
};

/// A (simulated) SMS service centre: devices attach under their own number
/// and receive every segment addressed to it.
class SmsGateway {
 public:
  using Handler = std::function<void(const SmsEnvelope&)>;

  virtual ~SmsGateway() = default;

  /// Throws GatewayUnreachable.
  virtual void send(const SmsEnvelope& envelope) = 0;
  virtual void attach(const std::string& number, Handler handler) = 0;
  virtual void detach(const std::string& number) = 0;
};

/// In-process gateway. Segments for a number nobody has attached yet are
/// held and handed over on attach, like a store-and-forward SMSC. Handoff is
/// serialized: at most one handler runs at a time (reentrant sends from the
/// same thread are allowed).
class LoopbackGateway final : public SmsGateway {
 public:
  void send(const SmsEnvelope& envelope) override;
  void attach(const std::string& number, Handler handler) override;
  void detach(const std::string& number) override;

  std::size_t segments_sent() const;
  std::vector<SmsEnvelope> sent_log() const;

 private:
  mutable std::recursive_mutex mutex_;
  std::map<std::string, Handler> handlers_;
  std::map<std::string, std::vector<SmsEnvelope>> pending_;
  std::vector<SmsEnvelope> log_;
};

/// Resolves gateway addresses: "loopback" (shared in-process instance),
/// "loopback:<name>" (named instance) and "tcp://host:port" (TCP client).
class GatewayRegistry {
 public:
  /// Throws InvalidParam for an unrecognised address, GatewayUnreachable when
  /// a TCP gateway cannot be contacted.
  std::shared_ptr<SmsGateway> resolve(const std::string& address);

  std::shared_ptr<LoopbackGateway> loopback(const std::string& name = "");

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<SmsGateway>> gateways_;
};

}  // namespace gloss::transport
