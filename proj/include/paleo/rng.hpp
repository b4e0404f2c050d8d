#ifndef PALEO_RNG_HPP
#define PALEO_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <span>

namespace paleo {

// Counter-keyed pseudo-random stream. Every consumer derives its own key from
// the run seed plus a list of integer ids (particle slot, slice, purpose tag),
// so draws are independent of thread scheduling and worker count.
//
// The generator is the SplitMix64 sequence started at the derived key: the
// state advances by a fixed odd constant and the output is a bijective mix of
// the state. Streams with distinct keys are effectively independent for Monte
// Carlo use.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1); never returns an exact endpoint.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the polar (Marsaglia) method. The second deviate of
  // each accepted pair is discarded; draw count per call is data dependent but
  // fully determined by the stream.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Chi-square with one degree of freedom.
  double chisq1() {
    double z = normal();
    return z * z;
  }

 private:
  std::uint64_t state_;
};

// Derives a stream key by folding ids into the seed one mixing round at a
// time. Order matters: rng_key(s, {a, b}) != rng_key(s, {b, a}) in general.
std::uint64_t rng_key(std::uint64_t seed, std::span<const std::uint64_t> ids);
std::uint64_t rng_key(std::uint64_t seed, std::initializer_list<std::uint64_t> ids);

// Purpose tags keeping unrelated stream families apart.
namespace rng_tag {
inline constexpr std::uint64_t prior = 0x01;
inline constexpr std::uint64_t filter = 0x02;
inline constexpr std::uint64_t rejuvenate = 0x03;
inline constexpr std::uint64_t resample_theta = 0x04;
inline constexpr std::uint64_t simulate = 0x05;
inline constexpr std::uint64_t summary = 0x06;
}  // namespace rng_tag

}  // namespace paleo

#endif
