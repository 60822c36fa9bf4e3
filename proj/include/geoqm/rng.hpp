#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace geoqm {

/// SplitMix64 finalizer; used only to derive seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-trial random stream. The seed depends only on (master seed, stream
/// tag, index), so results do not depend on which worker runs a trial.
class Stream {
 public:
  using engine_type = std::mt19937_64;

  explicit Stream(std::uint64_t seed) : engine_(seed) {}
  Stream(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t index)
      : engine_(derive(master_seed, tag, index)) {}

  static constexpr std::uint64_t derive(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(splitmix64(master_seed) ^ tag) ^ index);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal by Box-Muller (one variate per pair of uniforms), so
  /// sequences do not depend on the standard library's distributions.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::uint64_t bits() { return engine_(); }

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
};

/// Random-access uniforms: element n of the SplitMix64 sequence seeded with
/// `key`. Any element can be computed without generating the earlier ones,
/// so a consumer may skip values it does not need without changing the
/// values it does read.
class CounterStream {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit CounterStream(std::uint64_t key) : key_(key) {}

  std::uint64_t bits(std::uint64_t n) const noexcept { return splitmix64(key_ + n * kGamma); }
  double uniform(std::uint64_t n) const noexcept { return double(bits(n) >> 11) * 0x1.0p-53; }
  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

/// Stream tags keep experiments that share a master seed independent.
namespace stream_tag {
inline constexpr std::uint64_t collapse = 0x636f6c6c61707365ULL;
inline constexpr std::uint64_t markov = 0x6d61726b6f760000ULL;
inline constexpr std::uint64_t epr = 0x6570720000000000ULL;
inline constexpr std::uint64_t sampler = 0x73616d706c657200ULL;
inline constexpr std::uint64_t states = 0x7374617465730000ULL;
}  // namespace stream_tag

}  // namespace geoqm
