#include "gloss/transport/assemblies.hpp"

#include "gloss/pipeline/components.hpp"
#include "gloss/transport/file_sink.hpp"
#include "gloss/transport/sms_device.hpp"
#include "gloss/transport/xml_codec.hpp"

namespace gloss::transport {

using pipeline::AdaptDirection;
using pipeline::CodecAdapter;

std::unique_ptr<pipeline::Assembly> build_mobile_assembly(MobileAssemblyOptions o) {
  auto assembly = std::make_unique<pipeline::Assembly>(o.id);
  const auto codec = location_codec();

  assembly->emplace<GpsSource>("gps_device", std::move(o.trace), o.interval, o.user, o.mode);
  assembly->emplace<CodecAdapter>("xml_generator", AdaptDirection::record_to_text, codec);
  assembly->emplace<CodecAdapter>("gps_adapter", AdaptDirection::text_to_record, codec);
  assembly->emplace<pipeline::EventBus>("event_bus");
  assembly->emplace<CodecAdapter>("sms_adapter", AdaptDirection::record_to_text, codec);
  assembly->emplace<SmsDevice>("sms_device", SmsDevice::Options{o.gateway, o.user, o.server_number, false});

  assembly->connect("gps_device", "xml_generator");
  assembly->connect("xml_generator", "gps_adapter");
  assembly->connect("gps_adapter", "event_bus");
  assembly->connect("event_bus", "sms_adapter");
  assembly->connect("sms_adapter", "sms_device");
  return assembly;
}

std::unique_ptr<pipeline::Assembly> build_server_assembly(ServerAssemblyOptions o) {
  auto assembly = std::make_unique<pipeline::Assembly>(o.id);
  assembly->emplace<SmsDevice>("sms_device", SmsDevice::Options{o.gateway, o.own_number, std::nullopt, true});
  assembly->emplace<FileSink>("saviour", o.inbox);
  assembly->connect("sms_device", "saviour");
  return assembly;
}

}  // namespace gloss::transport
