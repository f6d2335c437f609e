#pragma once

#include <cstddef>

#include "cwcl/types.hpp"

namespace cwcl::kernels {

enum class Backend { Scalar, Avx2 };

/// sum_{n=0}^{count-1} |x[n]|^2 * exp(-i*omega*n)
using PowerSumFn = cplx (*)(const cplx* x, std::size_t count, double omega);

/// sum_{n=0}^{count-1} 2*Re{u[n]*conj(v[n])} * exp(-i*omega*n)
using CrossSumFn = cplx (*)(const cplx* u, const cplx* v, std::size_t count,
                            double omega);

cplx power_sum_scalar(const cplx* x, std::size_t count, double omega);
cplx cross_sum_scalar(const cplx* u, const cplx* v, std::size_t count,
                      double omega);

#if defined(__x86_64__) || defined(_M_X64)
cplx power_sum_avx2(const cplx* x, std::size_t count, double omega);
cplx cross_sum_avx2(const cplx* u, const cplx* v, std::size_t count,
                    double omega);
#endif

Backend active_backend();
void force_backend(Backend backend);  // testing hook
void reset_backend();                 // back to auto detection

cplx power_sum(const cplx* x, std::size_t count, double omega);
cplx cross_sum(const cplx* u, const cplx* v, std::size_t count, double omega);

}  // namespace cwcl::kernels
