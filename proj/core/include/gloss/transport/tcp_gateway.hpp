#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gloss/transport/gateway.hpp"

namespace gloss::transport {

/// One TCP gateway line, `SMS\tfrom\tto\tmessage_id\tindex\ttotal\tpayload`
/// with the payload percent-encoded, without the trailing LF.
std::string format_gateway_line(const SmsEnvelope& envelope);
/// Throws ParseFailure.
SmsEnvelope parse_gateway_line(std::string_view line);

/// Relay for the TCP gateway protocol. Clients announce each number they
/// serve with `REG\t<number>`; SMS lines are forwarded to the connection that
/// registered the recipient, or held until it registers.
class TcpGatewayRelay {
 public:
  TcpGatewayRelay() = default;
  ~TcpGatewayRelay();

  TcpGatewayRelay(const TcpGatewayRelay&) = delete;
  TcpGatewayRelay& operator=(const TcpGatewayRelay&) = delete;

  /// Binds 127.0.0.1 (or `host`) and starts accepting. Port 0 picks a free
  /// port. Returns the bound port. Throws IoFailure.
  std::uint16_t start(std::uint16_t port = 0, const std::string& host = "127.0.0.1");
  void stop();

  std::size_t lines_relayed() const noexcept { return relayed_.load(); }

 private:
  struct Connection;

  void accept_loop();
  void serve(std::shared_ptr<Connection> conn);
  void route(const std::string& line, const std::string& to);

  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mutex_;
  std::vector<std::shared_ptr<Connection>> connections_;
  std::vector<std::thread> workers_;
  std::map<std::string, std::weak_ptr<Connection>> registered_;
  std::map<std::string, std::vector<std::string>> held_;
  std::atomic<std::size_t> relayed_{0};
};

/// Gateway client speaking the TCP line protocol to a relay.
class TcpGatewayClient final : public SmsGateway {
 public:
  /// Connects immediately. Throws GatewayUnreachable.
  TcpGatewayClient(const std::string& host, std::uint16_t port);
  ~TcpGatewayClient() override;

  void send(const SmsEnvelope& envelope) override;
  void attach(const std::string& number, Handler handler) override;
  void detach(const std::string& number) override;

  /// Parses "tcp://host:port". Returns nullopt when malformed.
  static std::optional<std::pair<std::string, std::uint16_t>> parse_address(std::string_view address);

 private:
  void write_line(const std::string& line);
  void read_loop();

  int fd_ = -1;
  std::atomic<bool> open_{true};
  std::mutex write_mutex_;
  std::mutex handlers_mutex_;
  std::map<std::string, Handler> handlers_;
  std::thread reader_;
};

}  // namespace gloss::transport
