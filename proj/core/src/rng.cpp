#include "gcnboost/rng.hpp"

#include <cmath>

namespace gcnboost {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = next_double();
  double u2 = next_double();
  while (u1 <= 0.0) u1 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t finalize(std::uint64_t h) {
  // One splitmix round so nearby inputs land far apart.
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = fnv1a(0xcbf29ce484222325ULL ^ seed, tag.data(), tag.size());
  return finalize(h);
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::uint64_t a) {
  std::uint64_t h = fnv1a(0xcbf29ce484222325ULL ^ seed, tag.data(), tag.size());
  h = fnv1a(h, &a, sizeof(a));
  return finalize(h);
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::uint64_t a,
                       std::uint64_t b) {
  std::uint64_t h = fnv1a(0xcbf29ce484222325ULL ^ seed, tag.data(), tag.size());
  h = fnv1a(h, &a, sizeof(a));
  h = fnv1a(h, &b, sizeof(b));
  return finalize(h);
}

}  // namespace gcnboost
