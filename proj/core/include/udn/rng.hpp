#pragma once

#include <cstdint>
#include <random>

namespace udn {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent stream seeds and to hash
/// (drop, link) identifiers into uniforms without touching a sequential stream.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Streams depend only on the pair, so
/// drop i sees the same numbers whatever order drops are executed in.
inline constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Small-state generator for streams that are seeded far more often than
/// they are drawn from.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  constexpr result_type operator()() noexcept {
    const std::uint64_t out = mix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

 private:
  std::uint64_t state_;
};

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng{stream_seed(master, index)};
}

/// Uniform in [0, 1) determined by three identifiers.
inline constexpr double hashed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t h = mix64(seed ^ mix64(a * 0xd1b54a32d192ed03ULL + mix64(b)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace udn
