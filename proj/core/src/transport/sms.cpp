#include "gloss/transport/sms.hpp"

#include <charconv>
#include <fmt/format.h>
#include <map>

#include "gloss/error.hpp"

namespace gloss::transport {

namespace {

bool is_hex(char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

unsigned two_digits(std::string_view s) {
  if (s.size() != 2 || s[0] < '0' || s[0] > '9' || s[1] < '0' || s[1] > '9') {
    throw Error(Errc::ParseFailure, "segment counter must be two digits");
  }
  return unsigned(s[0] - '0') * 10 + unsigned(s[1] - '0');
}

}  // namespace

MessageId MessageId::parse(std::string_view text) {
  if (text.size() != 8) throw Error(Errc::ParseFailure, "message id must be 8 hex digits");
  for (char c : text) {
    if (!is_hex(c)) throw Error(Errc::ParseFailure, "message id must be 8 hex digits");
  }
  std::uint32_t v = 0;
  std::from_chars(text.data(), text.data() + 8, v, 16);
  return MessageId(v);
}

std::string MessageId::str() const { return fmt::format("{:08x}", value_); }

std::string SmsSegment::wire_text() const {
  return fmt::format("GX|{}|{:02}/{:02}|{}", message_id.str(), index, total, payload);
}

SmsSegment SmsSegment::parse_wire_text(std::string_view body) {
  if (body.size() < kSmsHeaderLength || body.substr(0, 3) != "GX|" || body[11] != '|' || body[14] != '/' ||
      body[17] != '|') {
    throw Error(Errc::ParseFailure, "not a GX segment header");
  }
  SmsSegment s;
  s.message_id = MessageId::parse(body.substr(3, 8));
  s.index = two_digits(body.substr(12, 2));
  s.total = two_digits(body.substr(15, 2));
  if (s.index < 1 || s.index > s.total) throw Error(Errc::ParseFailure, "segment index out of range");
  s.payload = std::string(body.substr(kSmsHeaderLength));
  if (s.payload.size() > kSmsPayloadLength) throw Error(Errc::ParseFailure, "segment payload exceeds 142 characters");
  return s;
}

std::vector<SmsSegment> sms_split(std::string_view message, MessageId id) {
  for (char c : message) {
    if (static_cast<unsigned char>(c) > 0x7f) {
      throw Error(Errc::InvalidCharset, "SMS text must be 7-bit");
    }
  }
  const std::size_t total = message.empty() ? 1 : (message.size() + kSmsPayloadLength - 1) / kSmsPayloadLength;
  if (total > kMaxSegments) {
    throw Error(Errc::MessageTooLong, fmt::format("{} characters need {} segments (max {})", message.size(), total,
                                                  kMaxSegments));
  }
  std::vector<SmsSegment> out;
  out.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    out.push_back(SmsSegment{id, unsigned(i + 1), unsigned(total),
                             std::string(message.substr(i * kSmsPayloadLength, kSmsPayloadLength))});
  }
  return out;
}

ReassemblyResult sms_reassemble(const std::vector<SmsSegment>& segments) {
  if (segments.empty()) return Incomplete{};
  const MessageId id = segments.front().message_id;
  const unsigned total = segments.front().total;
  std::map<unsigned, const std::string*> parts;
  for (const auto& s : segments) {
    if (s.message_id != id) throw Error(Errc::MixedMessageIds, "segments belong to different messages");
    if (s.total != total) throw Error(Errc::InconsistentTotal, "segments disagree on the segment count");
    if (s.index < 1 || s.index > total) throw Error(Errc::InconsistentTotal, "segment index beyond total");
    parts.emplace(s.index, &s.payload);
  }
  if (parts.size() < total) {
    Incomplete inc;
    for (unsigned i = 1; i <= total; ++i) {
      if (!parts.count(i)) inc.missing.insert(i);
    }
    return inc;
  }
  std::string message;
  for (const auto& [index, payload] : parts) message += *payload;
  return message;
}

std::string percent_encode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\t': out += "%09"; break;
      case '\n': out += "%0A"; break;
      case '\r': out += "%0D"; break;
      case '%': out += "%25"; break;
      default: out += c;
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%') {
      out += text[i];
      continue;
    }
    if (i + 2 >= text.size() || !is_hex(text[i + 1]) || !is_hex(text[i + 2])) {
      throw Error(Errc::ParseFailure, "bad percent escape");
    }
    unsigned v = 0;
    std::from_chars(text.data() + i + 1, text.data() + i + 3, v, 16);
    out += static_cast<char>(v);
    i += 2;
  }
  return out;
}

}  // namespace gloss::transport
