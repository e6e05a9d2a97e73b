#ifndef ADMMTRACK_RNG_HPP_
#define ADMMTRACK_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace admmtrack {
namespace rng {

// SplitMix64 finalizer. Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Derives an independent stream key from (seed, domain, index). Streams with
// distinct (domain, index) pairs never overlap regardless of how many values
// each consumes.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t domain,
                                std::uint64_t index) {
  std::uint64_t k = mix64(seed + kGolden * (domain + 1));
  return mix64(k ^ (index + kGolden));
}

// Stream domains used across the project.
inline constexpr std::uint64_t kDomainGraph = 0x67726170;  // graph sampling
inline constexpr std::uint64_t kDomainTrack = 0x7472636B;  // per-track process
inline constexpr std::uint64_t kDomainDecay = 0x64656379;  // decay-fit tracks
inline constexpr std::uint64_t kDomainTest = 0x74657374;   // test fixtures

// Counter-based generator (SplitMix64 sequence over a derived key). Values
// depend only on (key, draw index), so a stream is replayable and two streams
// with different keys can be consumed from different threads independently.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}
  Stream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index)
      : key_(derive_key(seed, domain, index)) {}

  std::uint64_t next_u64() {
    counter_ += kGolden;
    return mix64(counter_ ^ key_);
  }

  // Uniform on (0, 1]; never returns 0 so log() below is safe.
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms per draw so
  // the mapping from draw index to consumed counters is fixed.
  double gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rng
}  // namespace admmtrack

#endif  // ADMMTRACK_RNG_HPP_
