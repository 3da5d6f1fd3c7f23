#ifndef JV2_RNG_HPP
#define JV2_RNG_HPP

#include <cmath>
#include <cstdint>
#include <utility>

namespace jv2 {

/// xorshift64* with polar-method normals. Everything is spelled out here (instead of using
/// <random> distributions) so a seed produces the same stream on every platform and library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) { reseed(seed); }

  /// Seeds through one splitmix64 round so that small or zero seeds still give a full state.
  void reseed(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    state_ = z != 0 ? z : 0x2545F4914F6CDD1DULL;
  }

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform in (0, 1): 53 random bits, offset by half a unit so log() never sees zero.
  double uniform() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Two independent standard normals (Marsaglia polar method). The number of draws varies
  /// with the rejections but depends only on the stream, never on the caller.
  std::pair<double, double> normalPair() {
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    return {u * m, v * m};
  }

  /// One standard normal; the partner value is discarded.
  double normal() { return normalPair().first; }

  std::uint64_t state() const { return state_; }

  /// Restores a raw state (as produced by state()). Zero is not a valid xorshift state.
  bool setState(std::uint64_t s) {
    if (s == 0) return false;
    state_ = s;
    return true;
  }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::uint64_t state_ = 1;
};

}  // namespace jv2

#endif  // JV2_RNG_HPP
