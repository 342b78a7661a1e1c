#ifndef DELAYGP_RNG_HPP
#define DELAYGP_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace delaygp {

// SplitMix64 (Vigna).  Used to expand seeds into generator state and to
// derive per-stream seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Seed for sub-stream k of a base seed.  The affine step is a bijection in k
// (the increment is odd), so streams of one base seed never collide.
inline std::uint64_t derive_stream_seed(std::uint64_t base_seed,
                                        std::uint64_t stream) {
  return SplitMix64(base_seed + stream * 0x9e3779b97f4a7c15ULL).next();
}

// xoshiro256++ (Blackman & Vigna), state seeded via SplitMix64.
// All randomness in the project flows through this generator so that runs
// are reproducible from a single 64-bit seed.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
    has_cached_normal_ = false;
    cached_normal_ = 0.0;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0, 1]; never zero, so log() of it is finite.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double next_unit_half_open() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit_half_open();
  }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller on (u1, u2); the sine mate is cached.
  // This choice is part of the reproducibility contract: a seed fixes the
  // exact sample stream.
  double next_normal() {
    if (has_cached_normal_) {
      has_cached_normal_ = false;
      return cached_normal_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit_half_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(a);
    has_cached_normal_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_;
  double cached_normal_;
  bool has_cached_normal_;
};

}  // namespace delaygp

#endif
