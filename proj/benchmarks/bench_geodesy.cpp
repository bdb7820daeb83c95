#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gloss/services/geodesy.hpp"

namespace {

void BM_Haversine(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  std::vector<gloss::LatLongCoordinate> points;
  for (int i = 0; i < 1024; ++i) points.emplace_back(lat(rng), lon(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gloss::services::haversine(points[i & 1023], points[(i + 1) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_Haversine);

}  // namespace
