#pragma once

#include <cmath>
#include <cstdint>

namespace gausstree {

// Splittable counter-based generator: every (seed, stream) pair yields an
// independent deterministic stream, so parallel consumers can draw without
// any shared state. Core is the splitmix64 finalizer.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    state_ = mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^ mix(stream + 0xBF58476D1CE4E5B9ULL));
    have_spare_ = false;
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^ mix(stream + 0xBF58476D1CE4E5B9ULL));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // uniform on (0,1), 53-bit resolution, never exactly 0
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Marsaglia's polar method
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  template <typename V>
  void shuffle(V& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_;
};

}  // namespace gausstree
