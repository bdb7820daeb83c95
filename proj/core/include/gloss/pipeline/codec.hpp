#pragma once

#include <any>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <typeindex>

#include "gloss/pipeline/event.hpp"

namespace gloss::pipeline {

/// Converts one record payload type to and from text.
struct Codec {
  std::string name;
  std::type_index record_type = typeid(void);
  std::function<std::string(const std::any&)> encode;
  std::function<std::any(std::string_view)> decode;
};

class CodecRegistry {
 public:
  void add(Codec codec);

  /// Throws UnknownCodec.
  const Codec& get(std::string_view name) const;
  const Codec* find(std::string_view name) const noexcept;
  const Codec* find_for(std::type_index record_type) const noexcept;

 private:
  std::map<std::string, Codec, std::less<>> codecs_;
};

enum class AdaptDirection { record_to_text, text_to_record };

std::string_view to_string(AdaptDirection direction) noexcept;
std::optional<AdaptDirection> parse_adapt_direction(std::string_view text) noexcept;

/// Returns the event re-expressed in the opposite kind. Decode/encode
/// failures surface as CodecFailure; a wrong-kind input is KindMismatch.
Event adapt(const Event& event, AdaptDirection direction, const Codec& codec);
Event adapt(const Event& event, AdaptDirection direction, const CodecRegistry& codecs, std::string_view codec_name);

}  // namespace gloss::pipeline
