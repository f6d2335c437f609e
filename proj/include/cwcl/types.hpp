#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace cwcl {

using cplx = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Complex baseband samples at a fixed sampling rate.
struct SampleBuffer {
  std::vector<cplx> samples;
  double sample_rate = 0.0;  // Hz

  std::size_t size() const { return samples.size(); }
  double sample_period() const { return 1.0 / sample_rate; }
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace cwcl
