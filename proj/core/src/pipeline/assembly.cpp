#include "gloss/pipeline/assembly.hpp"

#include <algorithm>
#include <spdlog/spdlog.h>

#include "gloss/error.hpp"

namespace gloss::pipeline {

namespace {
constexpr std::size_t kMaxDiagnostics = 256;
}

std::string_view to_string(PortDirection direction) noexcept {
  return direction == PortDirection::plug ? "PLUG" : "SOCKET";
}

std::string_view to_string(AssemblyState state) noexcept {
  switch (state) {
    case AssemblyState::created: return "CREATED";
    case AssemblyState::running: return "RUNNING";
    case AssemblyState::stopped: return "STOPPED";
  }
  return "UNKNOWN";
}

// ---------------------------------------------------------------------------
// Component

Component::Component(std::string id, std::string catalog_kind)
    : id_(std::move(id)), catalog_kind_(std::move(catalog_kind)) {}

Component::~Component() = default;

std::vector<Port> Component::ports() const {
  std::vector<Port> out;
  for (EventKind kind : {EventKind::text, EventKind::record}) {
    if (plugs_[slot(kind)]) out.push_back({id_, PortDirection::plug, kind});
    if (sockets_[slot(kind)]) out.push_back({id_, PortDirection::socket, kind});
  }
  return out;
}

std::optional<Port> Component::plug(EventKind kind) const {
  if (!plugs_[slot(kind)]) return std::nullopt;
  return Port{id_, PortDirection::plug, kind};
}

std::optional<Port> Component::socket(EventKind kind) const {
  if (!sockets_[slot(kind)]) return std::nullopt;
  return Port{id_, PortDirection::socket, kind};
}

void Component::put(const Event&) {}

void Component::add_plug(EventKind kind) { plugs_[slot(kind)] = true; }
void Component::add_socket(EventKind kind) { sockets_[slot(kind)] = true; }

void Component::emit(const Event& event) {
  if (assembly_ == nullptr || assembly_->state() != AssemblyState::running) {
    throw Error(Errc::NotRunning, "component '" + id_ + "' emitted outside a running assembly");
  }
  if (!sockets_[slot(event.kind())]) {
    throw Error(Errc::KindMismatch, "component '" + id_ + "' has no " +
                                        std::string(to_string(event.kind())) + " socket");
  }
  assembly_->deliver(*this, event);
}

void Component::report(const std::string& message) const {
  if (assembly_ != nullptr) {
    assembly_->report(id_, message);
  } else {
    spdlog::warn("[{}] {}", id_, message);
  }
}

// ---------------------------------------------------------------------------
// Assembly

Assembly::Assembly(std::string id) : id_(std::move(id)) {}

Assembly::~Assembly() {
  if (state() == AssemblyState::running) {
    try {
      stop();
    } catch (...) {
    }
  }
}

Component& Assembly::add(std::unique_ptr<Component> component) {
  std::lock_guard lock(lifecycle_mutex_);
  if (state() != AssemblyState::created) {
    throw Error(Errc::AssemblyNotEditable, "assembly '" + id_ + "' is " + std::string(to_string(state())));
  }
  if (find(component->id()) != nullptr) {
    throw Error(Errc::DuplicateComponent, "component id '" + component->id() + "' already used");
  }
  component->assembly_ = this;
  components_.push_back(std::move(component));
  return *components_.back();
}

Component& Assembly::require(std::string_view component_id) {
  Component* c = find(component_id);
  if (c == nullptr) throw Error(Errc::UnknownComponent, "no component '" + std::string(component_id) + "'");
  return *c;
}

Component* Assembly::find(std::string_view component_id) noexcept {
  for (auto& c : components_) {
    if (c->id() == component_id) return c.get();
  }
  return nullptr;
}

const Component* Assembly::find(std::string_view component_id) const noexcept {
  return const_cast<Assembly*>(this)->find(component_id);
}

std::vector<const Component*> Assembly::components() const {
  std::vector<const Component*> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(c.get());
  return out;
}

bool Assembly::reaches(const Component* from, const Component* to) const {
  std::vector<const Component*> stack{from};
  std::vector<const Component*> seen;
  while (!stack.empty()) {
    const Component* c = stack.back();
    stack.pop_back();
    if (c == to) return true;
    if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
    seen.push_back(c);
    for (const auto& list : c->registrants_) {
      stack.insert(stack.end(), list.begin(), list.end());
    }
  }
  return false;
}

const Connection& Assembly::connect(const Port& from, const Port& to) {
  std::lock_guard lock(lifecycle_mutex_);
  if (state() != AssemblyState::created) {
    throw Error(Errc::AssemblyNotEditable, "assembly '" + id_ + "' is " + std::string(to_string(state())));
  }
  Component& upstream = require(from.component_id);
  Component& downstream = require(to.component_id);
  if (from.direction != PortDirection::socket || to.direction != PortDirection::plug) {
    throw Error(Errc::KindMismatch, "connections run from a SOCKET to a PLUG");
  }
  if (!upstream.socket(from.kind) || !downstream.plug(to.kind)) {
    throw Error(Errc::KindMismatch, "port not exposed by component");
  }
  if (from.kind != to.kind) {
    throw Error(Errc::KindMismatch, std::string(to_string(from.kind)) + " socket '" + from.component_id +
                                        "' cannot feed " + std::string(to_string(to.kind)) + " plug '" +
                                        to.component_id + "'");
  }
  if (&upstream == &downstream || reaches(&downstream, &upstream)) {
    throw Error(Errc::CycleWouldForm, from.component_id + " -> " + to.component_id + " closes a cycle");
  }
  upstream.registrants_[Component::slot(from.kind)].push_back(&downstream);
  connections_.push_back({from, to});
  return connections_.back();
}

EventKind infer_connection_kind(const Component& upstream, const Component& downstream) {
  std::vector<EventKind> shared;
  for (EventKind kind : {EventKind::text, EventKind::record}) {
    if (upstream.socket(kind) && downstream.plug(kind)) shared.push_back(kind);
  }
  if (shared.empty()) {
    throw Error(Errc::KindMismatch, "no socket of '" + upstream.id() + "' matches a plug of '" + downstream.id() + "'");
  }
  if (shared.size() > 1) {
    throw Error(Errc::AmbiguousPorts, "'" + upstream.id() + "' -> '" + downstream.id() + "' matches several kinds");
  }
  return shared.front();
}

const Connection& Assembly::connect(std::string_view from_id, std::string_view to_id) {
  EventKind kind;
  {
    std::lock_guard lock(lifecycle_mutex_);
    kind = infer_connection_kind(require(from_id), require(to_id));
  }
  return connect(Port{std::string(from_id), PortDirection::socket, kind},
                 Port{std::string(to_id), PortDirection::plug, kind});
}

void Assembly::start() {
  {
    std::lock_guard lock(lifecycle_mutex_);
    AssemblyState s = state();
    if (s == AssemblyState::running) {
      throw Error(Errc::InvalidStateTransition, "assembly '" + id_ + "' is already RUNNING");
    }
    {
      std::lock_guard flow(flow_mutex_);
      state_ = AssemblyState::running;
    }
  }
  for (auto& c : components_) {
    Component* component = c.get();
    post([component] { component->on_start(); });
  }
}

void Assembly::stop() {
  std::lock_guard lock(lifecycle_mutex_);
  AssemblyState s = state();
  if (s == AssemblyState::stopped) return;
  if (s == AssemblyState::created) {
    throw Error(Errc::InvalidStateTransition, "assembly '" + id_ + "' was never started");
  }
  {
    std::lock_guard flow(flow_mutex_);
    state_ = AssemblyState::stopped;
  }
  {
    std::lock_guard mailbox(mailbox_mutex_);
    mailbox_.clear();
  }
  for (auto& c : components_) {
    try {
      c->on_stop();
    } catch (const std::exception& e) {
      report(c->id(), std::string("on_stop failed: ") + e.what());
    }
  }
}

void Assembly::emit(std::string_view component_id, const Event& event) {
  if (state() != AssemblyState::running) {
    throw Error(Errc::NotRunning, "assembly '" + id_ + "' is " + std::string(to_string(state())));
  }
  Component* c = &require(component_id);
  if (!c->socket(event.kind())) {
    throw Error(Errc::KindMismatch, "component '" + c->id() + "' has no " +
                                        std::string(to_string(event.kind())) + " socket");
  }
  post([c, event] { c->emit(event); });
}

void Assembly::inject(std::string_view component_id, const Event& event) {
  if (state() != AssemblyState::running) {
    throw Error(Errc::NotRunning, "assembly '" + id_ + "' is " + std::string(to_string(state())));
  }
  Component* c = &require(component_id);
  if (!c->plug(event.kind())) {
    throw Error(Errc::KindMismatch, "component '" + c->id() + "' has no " +
                                        std::string(to_string(event.kind())) + " plug");
  }
  post([c, event] { c->put(event); });
}

void Assembly::post(std::function<void()> task) {
  {
    std::lock_guard lock(mailbox_mutex_);
    mailbox_.push_back(std::move(task));
    if (draining_) return;
    draining_ = true;
  }
  for (;;) {
    std::function<void()> next;
    {
      std::lock_guard lock(mailbox_mutex_);
      if (mailbox_.empty()) {
        draining_ = false;
        return;
      }
      next = std::move(mailbox_.front());
      mailbox_.pop_front();
    }
    std::lock_guard flow(flow_mutex_);
    if (state() != AssemblyState::running) continue;
    try {
      next();
    } catch (const std::exception& e) {
      report("", e.what());
    }
  }
}

void Assembly::deliver(Component& emitter, const Event& event) {
  if (observer_) observer_(emitter, event);
  // Copy: a registrant's processing cannot edit the list (edits need CREATED),
  // but iterate a snapshot anyway so delivery order is fixed at emit time.
  const auto targets = emitter.registrants_[Component::slot(event.kind())];
  for (Component* target : targets) target->put(event);
}

void Assembly::set_observer(Observer observer) {
  std::lock_guard lock(lifecycle_mutex_);
  observer_ = std::move(observer);
}

void Assembly::report(const std::string& component_id, const std::string& message) {
  std::string line = component_id.empty() ? message : "[" + component_id + "] " + message;
  spdlog::warn("assembly {}: {}", id_, line);
  std::lock_guard lock(diagnostics_mutex_);
  diagnostics_.push_back(std::move(line));
  if (diagnostics_.size() > kMaxDiagnostics) diagnostics_.pop_front();
}

std::vector<std::string> Assembly::diagnostics() const {
  std::lock_guard lock(diagnostics_mutex_);
  return {diagnostics_.begin(), diagnostics_.end()};
}

}  // namespace gloss::pipeline
