#include "cwcl/kernels.hpp"

namespace cwcl::kernels {

namespace {

Backend detect() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
  return Backend::Scalar;
}

Backend& current() {
  static Backend backend = detect();
  return backend;
}

}  // namespace

Backend active_backend() { return current(); }

void force_backend(Backend backend) { current() = backend; }

void reset_backend() { current() = detect(); }

cplx power_sum(const cplx* x, std::size_t count, double omega) {
#if defined(__x86_64__) || defined(_M_X64)
  if (current() == Backend::Avx2) return power_sum_avx2(x, count, omega);
#endif
  return power_sum_scalar(x, count, omega);
}

cplx cross_sum(const cplx* u, const cplx* v, std::size_t count, double omega) {
#if defined(__x86_64__) || defined(_M_X64)
  if (current() == Backend::Avx2) return cross_sum_avx2(u, v, count, omega);
#endif
  return cross_sum_scalar(u, v, count, omega);
}

}  // namespace cwcl::kernels
