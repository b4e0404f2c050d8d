#include "paleo/rng.hpp"

#include <cmath>

namespace paleo {

double RngStream::normal() {
  // Marsaglia polar method, second deviate discarded.
  for (;;) {
    double u = 2.0 * uniform() - 1.0;
    double v = 2.0 * uniform() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

std::uint64_t rng_key(std::uint64_t seed, std::span<const std::uint64_t> ids) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t k = mix(seed + 0x9E3779B97F4A7C15ULL);
  for (std::uint64_t id : ids) {
    k = mix(k ^ (id + 0x9E3779B97F4A7C15ULL + (k << 6) + (k >> 2)));
  }
  return k;
}

std::uint64_t rng_key(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  return rng_key(seed, std::span<const std::uint64_t>(ids.begin(), ids.size()));
}

}  // namespace paleo
