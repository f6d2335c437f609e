#include "cwcl/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace cwcl::kernels {

// Four phase lanes advanced by a common e^{-i*4w} rotation, re-anchored to
// exact std::cos/std::sin phases every block so rotation round-off stays
// below the equivalence tolerance of the dispatch tests.
namespace {
constexpr std::size_t kAnchorBlock = 256;  // in groups of 4 samples

inline void anchor_phases(double omega, std::size_t n0, __m256d& cosv,
                          __m256d& sinv) {
  // lane order matches the hadd output order: n, n+2, n+1, n+3
  alignas(32) double c[4], s[4];
  const std::size_t idx[4] = {n0, n0 + 2, n0 + 1, n0 + 3};
  for (int i = 0; i < 4; ++i) {
    c[i] = std::cos(omega * static_cast<double>(idx[i]));
    s[i] = std::sin(omega * static_cast<double>(idx[i]));
  }
  cosv = _mm256_load_pd(c);
  sinv = _mm256_load_pd(s);
}
}  // namespace

cplx power_sum_avx2(const cplx* x, std::size_t count, double omega) {
  const double* d = reinterpret_cast<const double*>(x);
  const std::size_t groups = count / 4;
  const __m256d rc = _mm256_set1_pd(std::cos(4.0 * omega));
  const __m256d rs = _mm256_set1_pd(std::sin(4.0 * omega));
  __m256d acc_c = _mm256_setzero_pd();
  __m256d acc_s = _mm256_setzero_pd();
  __m256d cosv = _mm256_setzero_pd(), sinv = _mm256_setzero_pd();
  for (std::size_t g = 0; g < groups; ++g) {
    if (g % kAnchorBlock == 0) anchor_phases(omega, 4 * g, cosv, sinv);
    const __m256d a = _mm256_loadu_pd(d + 8 * g);
    const __m256d b = _mm256_loadu_pd(d + 8 * g + 4);
    const __m256d q = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    acc_c = _mm256_fmadd_pd(q, cosv, acc_c);
    acc_s = _mm256_fmadd_pd(q, sinv, acc_s);
    const __m256d nc = _mm256_fmsub_pd(cosv, rc, _mm256_mul_pd(sinv, rs));
    sinv = _mm256_fmadd_pd(sinv, rc, _mm256_mul_pd(cosv, rs));
    cosv = nc;
  }
  alignas(32) double cbuf[4], sbuf[4];
  _mm256_store_pd(cbuf, acc_c);
  _mm256_store_pd(sbuf, acc_s);
  double sum_c = cbuf[0] + cbuf[1] + cbuf[2] + cbuf[3];
  double sum_s = sbuf[0] + sbuf[1] + sbuf[2] + sbuf[3];
  for (std::size_t n = 4 * groups; n < count; ++n) {
    const double q = std::norm(x[n]);
    sum_c += q * std::cos(omega * static_cast<double>(n));
    sum_s += q * std::sin(omega * static_cast<double>(n));
  }
  return {sum_c, -sum_s};
}

cplx cross_sum_avx2(const cplx* u, const cplx* v, std::size_t count,
                    double omega) {
  const double* du = reinterpret_cast<const double*>(u);
  const double* dv = reinterpret_cast<const double*>(v);
  const std::size_t groups = count / 4;
  const __m256d rc = _mm256_set1_pd(std::cos(4.0 * omega));
  const __m256d rs = _mm256_set1_pd(std::sin(4.0 * omega));
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc_c = _mm256_setzero_pd();
  __m256d acc_s = _mm256_setzero_pd();
  __m256d cosv = _mm256_setzero_pd(), sinv = _mm256_setzero_pd();
  for (std::size_t g = 0; g < groups; ++g) {
    if (g % kAnchorBlock == 0) anchor_phases(omega, 4 * g, cosv, sinv);
    const __m256d ua = _mm256_loadu_pd(du + 8 * g);
    const __m256d ub = _mm256_loadu_pd(du + 8 * g + 4);
    const __m256d va = _mm256_loadu_pd(dv + 8 * g);
    const __m256d vb = _mm256_loadu_pd(dv + 8 * g + 4);
    __m256d q = _mm256_hadd_pd(_mm256_mul_pd(ua, va), _mm256_mul_pd(ub, vb));
    q = _mm256_mul_pd(q, two);
    acc_c = _mm256_fmadd_pd(q, cosv, acc_c);
    acc_s = _mm256_fmadd_pd(q, sinv, acc_s);
    const __m256d nc = _mm256_fmsub_pd(cosv, rc, _mm256_mul_pd(sinv, rs));
    sinv = _mm256_fmadd_pd(sinv, rc, _mm256_mul_pd(cosv, rs));
    cosv = nc;
  }
  alignas(32) double cbuf[4], sbuf[4];
  _mm256_store_pd(cbuf, acc_c);
  _mm256_store_pd(sbuf, acc_s);
  double sum_c = cbuf[0] + cbuf[1] + cbuf[2] + cbuf[3];
  double sum_s = sbuf[0] + sbuf[1] + sbuf[2] + sbuf[3];
  for (std::size_t n = 4 * groups; n < count; ++n) {
    const double q =
        2.0 * (u[n].real() * v[n].real() + u[n].imag() * v[n].imag());
    sum_c += q * std::cos(omega * static_cast<double>(n));
    sum_s += q * std::sin(omega * static_cast<double>(n));
  }
  return {sum_c, -sum_s};
}

}  // namespace cwcl::kernels

#endif  // x86_64
