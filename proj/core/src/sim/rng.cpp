#include "gloss/sim/rng.hpp"

namespace gloss::sim {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::mt19937_64 seeded(std::uint64_t seed, std::string_view link_id) {
  const std::uint64_t h = fnv1a64(link_id);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

LinkStream::LinkStream(std::uint64_t seed, std::string_view link_id) : engine_(seeded(seed, link_id)) {}

double LinkStream::next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

}  // namespace gloss::sim
