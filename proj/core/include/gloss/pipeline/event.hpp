#pragma once

#include <any>
#include <memory>
#include <string>
#include <string_view>
#include <typeindex>

namespace gloss::pipeline {

enum class EventKind { text, record };

std::string_view to_string(EventKind kind) noexcept;

/// An immutable unit flowing through a pipeline. TEXT events carry a string
/// (XML fragments are TEXT); RECORD events carry a typed value. Copies share
/// the payload, so fan-out never duplicates it.
class Event {
 public:
  static Event text(std::string payload);

  template <class T>
  static Event record(T value) {
    Event e(EventKind::record);
    e.record_ = std::make_shared<const std::any>(std::move(value));
    return e;
  }

  EventKind kind() const noexcept { return kind_; }

  /// Throws std::logic_error unless kind() == text.
  const std::string& text() const;

  /// Throws std::logic_error unless kind() == record.
  const std::any& record() const;

  std::type_index record_type() const;

  template <class T>
  const T* record_if() const noexcept {
    return record_ ? std::any_cast<T>(record_.get()) : nullptr;
  }

 private:
  explicit Event(EventKind kind) : kind_(kind) {}

  EventKind kind_;
  std::shared_ptr<const std::string> text_;
  std::shared_ptr<const std::any> record_;
};

}  // namespace gloss::pipeline
