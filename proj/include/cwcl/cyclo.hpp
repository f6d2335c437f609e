#pragma once

#include <span>
#include <vector>

#include "cwcl/types.hpp"

namespace cwcl {

/// One non-asymptotic cyclic (cross-)correlation value.
struct CacEstimate {
  cplx value;
  double alpha = 0.0;
  std::size_t n_samples = 0;
};

/// (1/N) sum |r(n)|^2 exp(-j 2 pi alpha n Ts)
CacEstimate cac(const SampleBuffer& buf, double alpha);

/// (1/N) sum 2 Re{u(n) v*(n)} exp(-j 2 pi alpha n Ts)
CacEstimate ccc(const SampleBuffer& u, const SampleBuffer& v, double alpha);

/// Six-term expansion of the received-signal CAC from its component
/// buffers; algebraically equal to cac(compose_from_parts(...), alpha).
CacEstimate decompose_cac(const SampleBuffer& st, const SampleBuffer& si,
                          const SampleBuffer& w, double p_tk_dbm,
                          double p_ik_dbm, double alpha);

/// Lower bound 10*ceil(fs/|alpha_t - alpha_i|) keeping the interferer's
/// spectral-line leakage below -30 dB.
std::size_t min_samples(double fs, double alpha_t, double alpha_i);

/// Sample feature variation coefficient over M CAC realizations.
struct FvcRecord {
  double phi_hat = 0.0;
  int M = 0;
  double v_s = 0.0;  // sample variance (|.|^2 convention)
  double e_s = 0.0;  // sample mean of |R|^2
  cplx m_s;          // sample mean
};

FvcRecord fvc_sample(std::span<const CacEstimate> realizations);

/// Confidence interval machinery for phi_hat = v_s/e_s as a ratio of two
/// Gaussian variables; the interval is center +/- z_beta * stderr.
struct FvcConfidence {
  double center = 0.0;
  double stderr_ = 0.0;
  double z_beta = 0.0;
};

FvcConfidence fvc_confidence(double v_s, double e_s, double sigma_vs2,
                             double sigma_es2, double sigma_vses, int M,
                             double beta);

/// Smallest M > 50 whose FVC confidence halfwidth z_beta*S is below delta,
/// given the per-realization CAC moments var(R), E[|R|^2], var(|R|^2).
/// delta is clamped to >= 1e-3 and the search capped at m_max; failure to
/// satisfy the bound within the cap throws with the best achievable value.
int select_M(double var_r, double e_r2, double var_r2, double beta,
             double delta, int m_max = 10000);

/// Appendix-E-style moments of (v_s, e_s) over M realizations, from the
/// per-realization moments var(R), E[|R|^2], var(|R|^2).
struct SampleStatMoments {
  double mu_vs = 0.0;
  double sigma_vs2 = 0.0;
  double mu_es = 0.0;
  double sigma_es2 = 0.0;
  double sigma_vses = 0.0;
};

SampleStatMoments sample_stat_moments(double var_r, double e_r2,
                                      double var_r2, int M);

/// Two-sided Student-t quantile for confidence level beta with nu degrees
/// of freedom (i.e. the (1+beta)/2 quantile).
double student_t_two_sided(double beta, double nu);

/// Student-t inverse CDF at probability p.
double student_t_quantile(double p, double nu);

}  // namespace cwcl
