#include <benchmark/benchmark.h>

#include <string>

#include "gloss/pipeline/assembly.hpp"
#include "gloss/pipeline/components.hpp"
#include "gloss/transport/types.hpp"

namespace {

void BM_BusFanOut(benchmark::State& state) {
  using namespace gloss::pipeline;
  Assembly a("bench");
  a.emplace<EventBus>("bus");
  for (int i = 0; i < state.range(0); ++i) {
    const auto id = "sink" + std::to_string(i);
    a.emplace<Relay>(id, EventKind::record);
    a.connect("bus", id);
  }
  a.start();
  const auto e = Event::record(gloss::make_location_event(
      gloss::UserId("+447700900123"), gloss::LatLongCoordinate(56.34, -2.79), gloss::Timestamp{}));
  for (auto _ : state) a.inject("bus", e);
  a.stop();
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BusFanOut)->Arg(1)->Arg(5)->Arg(50);

}  // namespace
