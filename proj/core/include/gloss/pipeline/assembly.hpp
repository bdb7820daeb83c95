#pragma once

#include <atomic>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "gloss/pipeline/component.hpp"

namespace gloss::pipeline {

enum class AssemblyState { created, running, stopped };

std::string_view to_string(AssemblyState state) noexcept;

/// A runnable pipeline of components on one node.
///
/// All event propagation inside an assembly happens on a single flow of
/// control: work is posted to a mailbox, and whichever thread finds the
/// mailbox idle drains it. Delivery itself is direct, depth-first method
/// invocation. Connections must form a DAG and can only be edited while the
/// assembly is CREATED.
class Assembly {
 public:
  using Observer = std::function<void(const Component& emitter, const Event& event)>;

  explicit Assembly(std::string id);
  ~Assembly();

  Assembly(const Assembly&) = delete;
  Assembly& operator=(const Assembly&) = delete;

  const std::string& id() const noexcept { return id_; }
  AssemblyState state() const noexcept { return state_.load(); }

  Component& add(std::unique_ptr<Component> component);

  template <class C, class... Args>
  C& emplace(Args&&... args) {
    return static_cast<C&>(add(std::make_unique<C>(std::forward<Args>(args)...)));
  }

  /// Registers `to` (a plug) with `from` (a socket).
  const Connection& connect(const Port& from, const Port& to);

  /// Connects two components through the unique kind offered by the
  /// upstream socket and accepted by the downstream plug.
  const Connection& connect(std::string_view from_id, std::string_view to_id);

  Component* find(std::string_view component_id) noexcept;
  const Component* find(std::string_view component_id) const noexcept;
  std::vector<const Component*> components() const;
  const std::vector<Connection>& connections() const noexcept { return connections_; }

  void start();
  /// Idempotent once STOPPED. Must not be called from inside component code.
  void stop();

  /// Emits `event` from the named component as if the component produced it.
  void emit(std::string_view component_id, const Event& event);

  /// Puts `event` into the named component's plug.
  void inject(std::string_view component_id, const Event& event);

  /// Queues work on the assembly's flow of control. Runs it immediately on
  /// the calling thread when no other thread is draining the mailbox. Work is
  /// discarded unless the assembly is RUNNING when it executes.
  void post(std::function<void()> task);

  /// Sees every emission, before fan-out. Set before start().
  void set_observer(Observer observer);

  void report(const std::string& component_id, const std::string& message);
  std::vector<std::string> diagnostics() const;

 private:
  friend class Component;

  void deliver(Component& emitter, const Event& event);
  bool reaches(const Component* from, const Component* to) const;
  Component& require(std::string_view component_id);

  std::string id_;
  std::atomic<AssemblyState> state_{AssemblyState::created};
  std::vector<std::unique_ptr<Component>> components_;
  std::vector<Connection> connections_;
  Observer observer_;

  std::mutex lifecycle_mutex_;  // start/stop/edit
  std::mutex flow_mutex_;       // held while a task runs

  std::mutex mailbox_mutex_;
  std::deque<std::function<void()>> mailbox_;
  bool draining_ = false;

  mutable std::mutex diagnostics_mutex_;
  std::deque<std::string> diagnostics_;
};

/// The single kind offered by `upstream`'s sockets and accepted by
/// `downstream`'s plugs. Throws KindMismatch when there is none and
/// AmbiguousPorts when there is more than one.
EventKind infer_connection_kind(const Component& upstream, const Component& downstream);

}  // namespace gloss::pipeline
