#include "gloss/pipeline/event.hpp"

#include <stdexcept>

namespace gloss::pipeline {

std::string_view to_string(EventKind kind) noexcept {
  return kind == EventKind::text ? "TEXT" : "RECORD";
}

Event Event::text(std::string payload) {
  Event e(EventKind::text);
  e.text_ = std::make_shared<const std::string>(std::move(payload));
  return e;
}

const std::string& Event::text() const {
  if (kind_ != EventKind::text) throw std::logic_error("event is not TEXT");
  return *text_;
}

const std::any& Event::record() const {
  if (kind_ != EventKind::record) throw std::logic_error("event is not RECORD");
  return *record_;
}

std::type_index Event::record_type() const {
  if (kind_ != EventKind::record) return typeid(void);
  return record_->type();
}

}  // namespace gloss::pipeline
