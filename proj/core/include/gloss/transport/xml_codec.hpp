#pragma once

#include <string>
#include <string_view>

#include "gloss/pipeline/codec.hpp"
#include "gloss/transport/types.hpp"

namespace gloss::transport {

inline constexpr std::string_view kLocationCodecName = "location_xml";

/// Canonical, byte-deterministic fragment:
/// `<locationEvent><user id=".."/><position lat=".." lon=".."/><timestamp>..</timestamp></locationEvent>`
/// with lat/lon at five decimal places.
std::string xml_encode(const LocationEvent& event);

/// Inverse of xml_encode; attribute order and surrounding whitespace are free.
/// Throws MalformedXml, SchemaViolation, or RangeViolation.
LocationEvent xml_decode(std::string_view fragment);

/// Checks well-formedness only (single root element). Throws MalformedXml.
void xml_check_well_formed(std::string_view fragment);

pipeline::Codec location_codec();

/// Registry holding every codec this library ships ("location_xml").
const pipeline::CodecRegistry& standard_codecs();

}  // namespace gloss::transport
