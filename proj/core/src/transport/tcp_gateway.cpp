#include "gloss/transport/tcp_gateway.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fmt/format.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <spdlog/spdlog.h>
#include <sys/socket.h>
#include <unistd.h>

#include "gloss/error.hpp"

namespace gloss::transport {

namespace {

std::vector<std::string_view> split_tabs(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t p = s.find('\t', start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string_view::npos) return out;
    start = p + 1;
  }
}

unsigned parse_counter(std::string_view s) {
  unsigned v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw Error(Errc::ParseFailure, "bad segment counter '" + std::string(s) + "'");
  }
  return v;
}

bool write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

/// Calls `on_line` for each LF-terminated line until EOF or error.
template <class F>
void read_lines(int fd, F&& on_line) {
  std::string buffer;
  char chunk[4096];
  for (;;) {
    ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t pos;
    while ((pos = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      on_line(line);
    }
  }
}

}  // namespace

std::string format_gateway_line(const SmsEnvelope& e) {
  return fmt::format("SMS\t{}\t{}\t{}\t{}\t{}\t{}", e.from, e.to, e.segment.message_id.str(), e.segment.index,
                     e.segment.total, percent_encode(e.segment.payload));
}

SmsEnvelope parse_gateway_line(std::string_view line) {
  const auto f = split_tabs(line);
  if (f.size() != 7 || f[0] != "SMS") throw Error(Errc::ParseFailure, "not an SMS gateway line");
  SmsEnvelope e;
  e.from = std::string(f[1]);
  e.to = std::string(f[2]);
  e.segment.message_id = MessageId::parse(f[3]);
  e.segment.index = parse_counter(f[4]);
  e.segment.total = parse_counter(f[5]);
  e.segment.payload = percent_decode(f[6]);
  if (e.segment.index < 1 || e.segment.index > e.segment.total || e.segment.total > kMaxSegments) {
    throw Error(Errc::ParseFailure, "segment counters out of range");
  }
  return e;
}

// ---------------------------------------------------------------------------
// Relay

struct TcpGatewayRelay::Connection {
  int fd = -1;
  std::mutex write_mutex;

  bool write_line(const std::string& line) {
    std::lock_guard lock(write_mutex);
    return write_all(fd, line + "\n");
  }
};

TcpGatewayRelay::~TcpGatewayRelay() { stop(); }

std::uint16_t TcpGatewayRelay::start(std::uint16_t port, const std::string& host) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(Errc::IoFailure, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw Error(Errc::IoFailure, "bad listen address '" + host + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw Error(Errc::IoFailure, fmt::format("cannot listen on {}:{}: {}", host, port, why));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
  return ntohs(addr.sin_port);
}

void TcpGatewayRelay::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mutex_);
    for (auto& c : connections_) ::shutdown(c->fd, SHUT_RDWR);
    workers = std::move(workers_);
  }
  for (auto& w : workers) w.join();
  std::lock_guard lock(mutex_);
  for (auto& c : connections_) ::close(c->fd);
  connections_.clear();
}

void TcpGatewayRelay::accept_loop() {
  while (running_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto conn = std::make_shared<Connection>();
    conn->fd = fd;
    std::lock_guard lock(mutex_);
    if (!running_) {
      ::close(fd);
      return;
    }
    connections_.push_back(conn);
    workers_.emplace_back([this, conn] { serve(conn); });
  }
}

void TcpGatewayRelay::route(const std::string& line, const std::string& to) {
  std::shared_ptr<Connection> target;
  {
    std::lock_guard lock(mutex_);
    auto it = registered_.find(to);
    if (it != registered_.end()) target = it->second.lock();
    if (!target) {
      held_[to].push_back(line);
      return;
    }
  }
  if (target->write_line(line)) {
    ++relayed_;
  } else {
    std::lock_guard lock(mutex_);
    held_[to].push_back(line);
  }
}

void TcpGatewayRelay::serve(std::shared_ptr<Connection> conn) {
  read_lines(conn->fd, [&](const std::string& line) {
    if (line.rfind("REG\t", 0) == 0) {
      const std::string number = line.substr(4);
      std::vector<std::string> held;
      {
        std::lock_guard lock(mutex_);
        registered_[number] = conn;
        if (auto it = held_.find(number); it != held_.end()) {
          held = std::move(it->second);
          held_.erase(it);
        }
      }
      for (const auto& h : held) {
        if (conn->write_line(h)) ++relayed_;
      }
      return;
    }
    if (line.rfind("UNREG\t", 0) == 0) {
      std::lock_guard lock(mutex_);
      auto it = registered_.find(line.substr(6));
      if (it != registered_.end() && it->second.lock() == conn) registered_.erase(it);
      return;
    }
    try {
      const SmsEnvelope e = parse_gateway_line(line);
      route(line, e.to);
    } catch (const Error& e) {
      spdlog::warn("gateway relay: dropped line: {}", e.what());
    }
  });
  std::lock_guard lock(mutex_);
  for (auto it = registered_.begin(); it != registered_.end();) {
    if (it->second.lock() == conn) {
      it = registered_.erase(it);
    } else {
      ++it;
    }
  }
}

// ---------------------------------------------------------------------------
// Client

std::optional<std::pair<std::string, std::uint16_t>> TcpGatewayClient::parse_address(std::string_view address) {
  constexpr std::string_view scheme = "tcp://";
  if (address.substr(0, scheme.size()) != scheme) return std::nullopt;
  address.remove_prefix(scheme.size());
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  std::uint16_t port = 0;
  std::string_view p = address.substr(colon + 1);
  auto r = std::from_chars(p.data(), p.data() + p.size(), port);
  if (p.empty() || r.ec != std::errc{} || r.ptr != p.data() + p.size() || port == 0) return std::nullopt;
  return std::pair{std::string(address.substr(0, colon)), port};
}

TcpGatewayClient::TcpGatewayClient(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || res == nullptr) {
    throw Error(Errc::GatewayUnreachable, fmt::format("cannot resolve {}", host));
  }
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  const bool ok = fd_ >= 0 && ::connect(fd_, res->ai_addr, res->ai_addrlen) == 0;
  ::freeaddrinfo(res);
  if (!ok) {
    const std::string why = std::strerror(errno);
    if (fd_ >= 0) ::close(fd_);
    throw Error(Errc::GatewayUnreachable, fmt::format("tcp://{}:{}: {}", host, port, why));
  }
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  reader_ = std::thread([this] { read_loop(); });
}

TcpGatewayClient::~TcpGatewayClient() {
  open_ = false;
  ::shutdown(fd_, SHUT_RDWR);
  if (reader_.joinable()) reader_.join();
  ::close(fd_);
}

void TcpGatewayClient::write_line(const std::string& line) {
  std::lock_guard lock(write_mutex_);
  if (!open_ || !write_all(fd_, line + "\n")) {
    open_ = false;
    throw Error(Errc::GatewayUnreachable, "connection to gateway lost");
  }
}

void TcpGatewayClient::send(const SmsEnvelope& envelope) { write_line(format_gateway_line(envelope)); }

void TcpGatewayClient::attach(const std::string& number, Handler handler) {
  {
    std::lock_guard lock(handlers_mutex_);
    handlers_[number] = std::move(handler);
  }
  write_line("REG\t" + number);
}

void TcpGatewayClient::detach(const std::string& number) {
  {
    std::lock_guard lock(handlers_mutex_);
    handlers_.erase(number);
  }
  try {
    write_line("UNREG\t" + number);
  } catch (const Error&) {
  }
}

void TcpGatewayClient::read_loop() {
  read_lines(fd_, [this](const std::string& line) {
    SmsEnvelope e;
    try {
      e = parse_gateway_line(line);
    } catch (const Error& err) {
      spdlog::warn("gateway client: dropped line: {}", err.what());
      return;
    }
    Handler handler;
    {
      std::lock_guard lock(handlers_mutex_);
      auto it = handlers_.find(e.to);
      if (it == handlers_.end()) return;
      handler = it->second;
    }
    handler(e);
  });
  open_ = false;
}

}  // namespace gloss::transport
