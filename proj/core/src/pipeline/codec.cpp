#include "gloss/pipeline/codec.hpp"

#include "gloss/error.hpp"

namespace gloss::pipeline {

void CodecRegistry::add(Codec codec) {
  std::string key = codec.name;
  codecs_.insert_or_assign(std::move(key), std::move(codec));
}

const Codec& CodecRegistry::get(std::string_view name) const {
  const Codec* c = find(name);
  if (c == nullptr) throw Error(Errc::UnknownCodec, "no codec named '" + std::string(name) + "'");
  return *c;
}

const Codec* CodecRegistry::find(std::string_view name) const noexcept {
  auto it = codecs_.find(name);
  return it == codecs_.end() ? nullptr : &it->second;
}

const Codec* CodecRegistry::find_for(std::type_index record_type) const noexcept {
  for (const auto& [name, codec] : codecs_) {
    if (codec.record_type == record_type) return &codec;
  }
  return nullptr;
}

std::string_view to_string(AdaptDirection direction) noexcept {
  return direction == AdaptDirection::record_to_text ? "record_to_text" : "text_to_record";
}

std::optional<AdaptDirection> parse_adapt_direction(std::string_view text) noexcept {
  if (text == "record_to_text" || text == "RECORD_TO_TEXT") return AdaptDirection::record_to_text;
  if (text == "text_to_record" || text == "TEXT_TO_RECORD") return AdaptDirection::text_to_record;
  return std::nullopt;
}

Event adapt(const Event& event, AdaptDirection direction, const Codec& codec) {
  const EventKind expected = direction == AdaptDirection::record_to_text ? EventKind::record : EventKind::text;
  if (event.kind() != expected) {
    throw Error(Errc::KindMismatch, std::string(to_string(direction)) + " needs a " +
                                        std::string(to_string(expected)) + " event");
  }
  try {
    if (direction == AdaptDirection::record_to_text) {
      if (event.record_type() != codec.record_type) {
        throw Error(Errc::CodecFailure, "codec '" + codec.name + "' cannot encode this record type");
      }
      return Event::text(codec.encode(event.record()));
    }
    // std::any moves into the payload slot; the stored type is the codec's.
    return Event::record(codec.decode(event.text()));
  } catch (const Error& e) {
    if (e.code() == Errc::CodecFailure) throw;
    throw Error(Errc::CodecFailure, e.what());
  }
}

Event adapt(const Event& event, AdaptDirection direction, const CodecRegistry& codecs, std::string_view codec_name) {
  return adapt(event, direction, codecs.get(codec_name));
}

}  // namespace gloss::pipeline
