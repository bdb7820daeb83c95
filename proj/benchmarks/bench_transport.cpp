#include <benchmark/benchmark.h>

#include <string>

#include "gloss/transport/sms.hpp"
#include "gloss/transport/xml_codec.hpp"

namespace {

gloss::LocationEvent sample() {
  return gloss::make_location_event(gloss::UserId("+447700900123"), gloss::LatLongCoordinate(56.3402, -2.7955),
                                    gloss::parse_timestamp("2002-09-01T12:00:00.000Z"));
}

void BM_XmlEncode(benchmark::State& state) {
  const auto e = sample();
  for (auto _ : state) benchmark::DoNotOptimize(gloss::transport::xml_encode(e));
}
BENCHMARK(BM_XmlEncode);

void BM_XmlDecode(benchmark::State& state) {
  const auto text = gloss::transport::xml_encode(sample());
  for (auto _ : state) benchmark::DoNotOptimize(gloss::transport::xml_decode(text));
}
BENCHMARK(BM_XmlDecode);

void BM_SmsSplit(benchmark::State& state) {
  const std::string text(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) benchmark::DoNotOptimize(gloss::transport::sms_split(text, gloss::transport::MessageId(7)));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SmsSplit)->Arg(100)->Arg(2000);

void BM_SmsReassemble(benchmark::State& state) {
  const auto segments = gloss::transport::sms_split(std::string(2000, 'x'), gloss::transport::MessageId(7));
  for (auto _ : state) benchmark::DoNotOptimize(gloss::transport::sms_reassemble(segments));
}
BENCHMARK(BM_SmsReassemble);

}  // namespace
