#pragma once

#include <cstdint>
#include <string_view>

namespace gcnboost {

// All randomness in the project flows through this generator. The standard
// library distributions are implementation-defined, so we roll our own on top
// of splitmix64 to keep every output bit-reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform in [0, n). Multiply-shift bounding keeps it branch-free and
  // deterministic; the bias is < 2^-64 per draw.
  std::int64_t uniform_int(std::int64_t n) {
    const auto wide = static_cast<unsigned __int128>(next_u64()) *
                      static_cast<unsigned __int128>(n);
    return static_cast<std::int64_t>(wide >> 64);
  }

  // Standard normal via Box-Muller; caches the second value of each pair.
  double normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Seed derivation: every consumer of randomness derives its own stream from
// the global seed plus a purpose tag (and optional indices), so independent
// stages never share or reorder a stream.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::uint64_t a);
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::uint64_t a,
                       std::uint64_t b);

}  // namespace gcnboost
