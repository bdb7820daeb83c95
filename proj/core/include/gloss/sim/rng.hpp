#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gloss::sim {

/// 64-bit FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Per-link random substream: std::mt19937_64 seeded through std::seed_seq
/// with the run seed and the FNV-1a hash of the link id. Both algorithms are
/// fully specified by the standard, so draws are identical everywhere, and
/// adding a link never perturbs the draws of the others.
class LinkStream {
 public:
  LinkStream(std::uint64_t seed, std::string_view link_id);

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit();

 private:
  std::mt19937_64 engine_;
};

}  // namespace gloss::sim
