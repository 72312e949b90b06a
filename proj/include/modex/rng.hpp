#pragma once

#include <array>
#include <cstdint>

namespace modex {

// xoshiro256++ seeded through splitmix64.
//
// Streams are reproducible: the same seed always yields the same sequence.
// split(label) derives an independent substream keyed on (seed, label), so
// parallel consumers (Monte-Carlo chunks, epoch shuffles, data generators)
// can each own a stream without coordinating.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform in [0, 1)
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in (0, 1); safe under log()
  double next_double_pos() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal via the Marsaglia polar method
  double next_gaussian() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

  // Independent substream for `label`. Splitting the same parent with the
  // same label always gives the same stream; distinct labels give streams
  // with unrelated splitmix-mixed seeds.
  Rng split(std::uint64_t label) const noexcept {
    std::uint64_t x = seed_ ^ (0x9E3779B97F4A7C15ULL * (label + 1));
    const std::uint64_t child = splitmix64(x) ^ splitmix64(x);
    return Rng(child);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace modex
