#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gloss/pipeline/event.hpp"

namespace gloss::pipeline {

class Assembly;

enum class PortDirection {
  plug,    ///< receives events from an upstream socket
  socket,  ///< accepts registrations from downstream plugs
};

std::string_view to_string(PortDirection direction) noexcept;

struct Port {
  std::string component_id;
  PortDirection direction;
  EventKind kind;

  friend bool operator==(const Port&, const Port&) = default;
};

/// A registration of a downstream plug with an upstream socket.
struct Connection {
  Port from;  ///< socket side
  Port to;    ///< plug side

  friend bool operator==(const Connection&, const Connection&) = default;
};

/// Base class for pipeline components. A component exposes at most one plug
/// and at most one socket per event kind; subclasses declare them in their
/// constructor and override put() to handle inbound events.
class Component {
 public:
  Component(std::string id, std::string catalog_kind);
  virtual ~Component();

  Component(const Component&) = delete;
  Component& operator=(const Component&) = delete;

  const std::string& id() const noexcept { return id_; }
  const std::string& catalog_kind() const noexcept { return catalog_kind_; }

  std::vector<Port> ports() const;
  std::optional<Port> plug(EventKind kind) const;
  std::optional<Port> socket(EventKind kind) const;

  /// Called by the owning assembly for every event arriving on the plug of
  /// event.kind(). Runs on the assembly's flow of control.
  virtual void put(const Event& event);

 protected:
  void add_plug(EventKind kind);
  void add_socket(EventKind kind);

  /// Delivers to every registrant of the socket matching event.kind(),
  /// synchronously and in registration order.
  void emit(const Event& event);

  /// Records a diagnostic against the owning assembly (logged as well).
  void report(const std::string& message) const;

  /// Source components (timers, inbound transports) activate here.
  virtual void on_start() {}
  /// Must return only once the component will no longer post work.
  virtual void on_stop() {}

  Assembly* assembly() const noexcept { return assembly_; }

 private:
  friend class Assembly;

  static std::size_t slot(EventKind kind) noexcept { return kind == EventKind::text ? 0 : 1; }

  std::string id_;
  std::string catalog_kind_;
  std::array<bool, 2> plugs_{};
  std::array<bool, 2> sockets_{};
  std::array<std::vector<Component*>, 2> registrants_;
  Assembly* assembly_ = nullptr;
};

}  // namespace gloss::pipeline
