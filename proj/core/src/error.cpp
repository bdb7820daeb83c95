#include "gloss/error.hpp"

namespace gloss {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::CycleWouldForm: return "CycleWouldForm";
    case Errc::UnknownComponent: return "UnknownComponent";
    case Errc::DuplicateComponent: return "DuplicateComponent";
    case Errc::AssemblyNotEditable: return "AssemblyNotEditable";
    case Errc::NotRunning: return "NotRunning";
    case Errc::InvalidStateTransition: return "InvalidStateTransition";
    case Errc::AmbiguousPorts: return "AmbiguousPorts";
    case Errc::UnknownCodec: return "UnknownCodec";
    case Errc::CodecFailure: return "CodecFailure";
    case Errc::RangeViolation: return "RangeViolation";
    case Errc::InvalidUserId: return "InvalidUserId";
    case Errc::MalformedXml: return "MalformedXml";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::MessageTooLong: return "MessageTooLong";
    case Errc::InvalidCharset: return "InvalidCharset";
    case Errc::InconsistentTotal: return "InconsistentTotal";
    case Errc::MixedMessageIds: return "MixedMessageIds";
    case Errc::GatewayUnreachable: return "GatewayUnreachable";
    case Errc::IoFailure: return "IoFailure";
    case Errc::ParseFailure: return "ParseFailure";
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::UnknownHearsay: return "UnknownHearsay";
    case Errc::EmptyTrail: return "EmptyTrail";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::NoKnownLocation: return "NoKnownLocation";
    case Errc::ValidationFailure: return "ValidationFailure";
    case Errc::MissingPositions: return "MissingPositions";
    case Errc::UnknownCatalogKind: return "UnknownCatalogKind";
    case Errc::MissingParam: return "MissingParam";
    case Errc::InvalidParam: return "InvalidParam";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace gloss
