#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gloss::transport {

inline constexpr std::size_t kSmsLength = 160;
inline constexpr std::size_t kSmsHeaderLength = 18;  // "GX|xxxxxxxx|ii/tt|"
inline constexpr std::size_t kSmsPayloadLength = kSmsLength - kSmsHeaderLength;
inline constexpr std::size_t kMaxSegments = 99;

class MessageId {
 public:
  constexpr MessageId() = default;
  constexpr explicit MessageId(std::uint32_t value) : value_(value) {}

  /// Exactly eight hex digits. Throws ParseFailure.
  static MessageId parse(std::string_view text);

  std::uint32_t value() const noexcept { return value_; }
  std::string str() const;  ///< eight lowercase hex digits

  friend auto operator<=>(const MessageId&, const MessageId&) = default;

 private:
  std::uint32_t value_ = 0;
};

struct SmsSegment {
  MessageId message_id;
  unsigned index = 1;  ///< 1-based
  unsigned total = 1;
  std::string payload;

  /// Header plus payload, as it would travel in one SMS body.
  std::string wire_text() const;
  /// Inverse of wire_text(). Throws ParseFailure.
  static SmsSegment parse_wire_text(std::string_view body);

  friend bool operator==(const SmsSegment&, const SmsSegment&) = default;
};

/// Splits into ceil(len/142) segments (at least one). Only 7-bit characters
/// are accepted (InvalidCharset); more than 99 segments is MessageTooLong.
std::vector<SmsSegment> sms_split(std::string_view message, MessageId id);

struct Incomplete {
  std::set<unsigned> missing;
  friend bool operator==(const Incomplete&, const Incomplete&) = default;
};

using ReassemblyResult = std::variant<std::string, Incomplete>;

/// Order-independent; duplicate indices are idempotent. Throws
/// InconsistentTotal or MixedMessageIds.
ReassemblyResult sms_reassemble(const std::vector<SmsSegment>& segments);

/// Percent-encodes TAB, LF, CR and '%' (TCP gateway payload field).
std::string percent_encode(std::string_view text);
/// Throws ParseFailure on a malformed escape.
std::string percent_decode(std::string_view text);

}  // namespace gloss::transport
