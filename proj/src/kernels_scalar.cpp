#include "cwcl/kernels.hpp"

#include <cmath>

namespace cwcl::kernels {

// Reference kernels. The oscillator advances by complex rotation and is
// re-anchored to an exact std::polar phase every block to bound drift.
namespace {
constexpr std::size_t kAnchorBlock = 256;
}

cplx power_sum_scalar(const cplx* x, std::size_t count, double omega) {
  cplx acc(0.0, 0.0);
  const cplx step = std::polar(1.0, -omega);
  for (std::size_t base = 0; base < count; base += kAnchorBlock) {
    cplx phase = std::polar(1.0, -omega * static_cast<double>(base));
    const std::size_t end = std::min(count, base + kAnchorBlock);
    for (std::size_t n = base; n < end; ++n) {
      const double q = std::norm(x[n]);
      acc += q * phase;
      phase *= step;
    }
  }
  return acc;
}

cplx cross_sum_scalar(const cplx* u, const cplx* v, std::size_t count,
                      double omega) {
  cplx acc(0.0, 0.0);
  const cplx step = std::polar(1.0, -omega);
  for (std::size_t base = 0; base < count; base += kAnchorBlock) {
    cplx phase = std::polar(1.0, -omega * static_cast<double>(base));
    const std::size_t end = std::min(count, base + kAnchorBlock);
    for (std::size_t n = base; n < end; ++n) {
      const double q = 2.0 * (u[n].real() * v[n].real() + u[n].imag() * v[n].imag());
      acc += q * phase;
      phase *= step;
    }
  }
  return acc;
}

}  // namespace cwcl::kernels
