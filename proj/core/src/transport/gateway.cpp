#include "gloss/transport/gateway.hpp"

#include "gloss/error.hpp"
#include "gloss/transport/tcp_gateway.hpp"

namespace gloss::transport {

void LoopbackGateway::send(const SmsEnvelope& envelope) {
  std::lock_guard lock(mutex_);
  log_.push_back(envelope);
  auto it = handlers_.find(envelope.to);
  if (it == handlers_.end()) {
    pending_[envelope.to].push_back(envelope);
    return;
  }
  Handler handler = it->second;
  handler(envelope);
}

void LoopbackGateway::attach(const std::string& number, Handler handler) {
  std::lock_guard lock(mutex_);
  handlers_[number] = handler;
  auto it = pending_.find(number);
  if (it == pending_.end()) return;
  std::vector<SmsEnvelope> held = std::move(it->second);
  pending_.erase(it);
  for (const auto& e : held) handler(e);
}

void LoopbackGateway::detach(const std::string& number) {
  std::lock_guard lock(mutex_);
  handlers_.erase(number);
}

std::size_t LoopbackGateway::segments_sent() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

std::vector<SmsEnvelope> LoopbackGateway::sent_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::shared_ptr<LoopbackGateway> GatewayRegistry::loopback(const std::string& name) {
  std::lock_guard lock(mutex_);
  const std::string key = name.empty() ? "loopback" : "loopback:" + name;
  auto& slot = gateways_[key];
  if (!slot) slot = std::make_shared<LoopbackGateway>();
  return std::static_pointer_cast<LoopbackGateway>(slot);
}

std::shared_ptr<SmsGateway> GatewayRegistry::resolve(const std::string& address) {
  if (address == "loopback") return loopback();
  if (address.rfind("loopback:", 0) == 0 && address.size() > 9) return loopback(address.substr(9));
  auto tcp = TcpGatewayClient::parse_address(address);
  if (!tcp) throw Error(Errc::InvalidParam, "unrecognised gateway address '" + address + "'");
  std::lock_guard lock(mutex_);
  auto& slot = gateways_[address];
  if (!slot) slot = std::make_shared<TcpGatewayClient>(tcp->first, tcp->second);
  return slot;
}

}  // namespace gloss::transport
