#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gloss {

/// Machine-readable failure codes shared by every gloss module. The names
/// are part of the HTTP error contract, so keep `to_string` in sync.
enum class Errc {
  // pipeline
  KindMismatch,
  CycleWouldForm,
  UnknownComponent,
  DuplicateComponent,
  AssemblyNotEditable,
  NotRunning,
  InvalidStateTransition,
  AmbiguousPorts,
  UnknownCodec,
  CodecFailure,
  // domain values and transport
  RangeViolation,
  InvalidUserId,
  MalformedXml,
  SchemaViolation,
  MessageTooLong,
  InvalidCharset,
  InconsistentTotal,
  MixedMessageIds,
  GatewayUnreachable,
  IoFailure,
  // store and services
  ParseFailure,
  InvalidRange,
  UnknownHearsay,
  EmptyTrail,
  CoincidentPoints,
  NoKnownLocation,
  // simulator
  ValidationFailure,
  MissingPositions,
  // assembly factory
  UnknownCatalogKind,
  MissingParam,
  InvalidParam,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gloss
