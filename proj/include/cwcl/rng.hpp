#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cwcl {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic random stream. Streams for independent roles are derived
/// by hashing the base seed with the role coordinates, so trials can run
/// in any order (or concurrently) without changing results.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng derive(std::uint64_t base_seed, std::uint64_t a, std::uint64_t b = 0,
                    std::uint64_t c = 0) {
    std::uint64_t s = base_seed;
    detail::splitmix64(s);
    s ^= 0x6a09e667f3bcc909ULL + a;
    detail::splitmix64(s);
    s ^= 0xbb67ae8584caa73bULL + b;
    detail::splitmix64(s);
    s ^= 0x3c6ef372fe94f82bULL + c;
    return Rng(detail::splitmix64(s));
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t integer(std::uint64_t n) { return engine_() % n; }

  /// Standard normal via Box-Muller (implementation-defined std distributions
  /// are avoided so output is stable across standard libraries).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cwcl
