#include "cwcl/cyclo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cwcl/channel.hpp"
#include "cwcl/kernels.hpp"

namespace cwcl {

CacEstimate cac(const SampleBuffer& buf, double alpha) {
  if (buf.size() == 0) throw std::invalid_argument("empty buffer");
  const double omega = 2.0 * M_PI * alpha / buf.sample_rate;
  const cplx sum = kernels::power_sum(buf.samples.data(), buf.size(), omega);
  return {sum / static_cast<double>(buf.size()), alpha, buf.size()};
}

CacEstimate ccc(const SampleBuffer& u, const SampleBuffer& v, double alpha) {
  if (u.size() != v.size()) throw std::invalid_argument("length mismatch");
  if (u.size() == 0) throw std::invalid_argument("empty buffer");
  const double omega = 2.0 * M_PI * alpha / u.sample_rate;
  const cplx sum =
      kernels::cross_sum(u.samples.data(), v.samples.data(), u.size(), omega);
  return {sum / static_cast<double>(u.size()), alpha, u.size()};
}

CacEstimate decompose_cac(const SampleBuffer& st, const SampleBuffer& si,
                          const SampleBuffer& w, double p_tk_dbm,
                          double p_ik_dbm, double alpha) {
  if (st.size() != si.size() || st.size() != w.size())
    throw std::invalid_argument("misaligned component buffers");
  const double pt =
      std::isinf(p_tk_dbm) && p_tk_dbm < 0 ? 0.0 : dbm_to_mw(p_tk_dbm);
  const double pi =
      std::isinf(p_ik_dbm) && p_ik_dbm < 0 ? 0.0 : dbm_to_mw(p_ik_dbm);
  const cplx r_st = cac(st, alpha).value;
  const cplx r_si = cac(si, alpha).value;
  const cplx r_stsi = ccc(st, si, alpha).value;
  const cplx r_w = cac(w, alpha).value;
  const cplx r_stw = ccc(st, w, alpha).value;
  const cplx r_siw = ccc(si, w, alpha).value;
  const cplx value = pt * r_st + pi * r_si + std::sqrt(pt * pi) * r_stsi +
                     r_w + std::sqrt(pt) * r_stw + std::sqrt(pi) * r_siw;
  return {value, alpha, st.size()};
}

std::size_t min_samples(double fs, double alpha_t, double alpha_i) {
  const double delta = std::abs(alpha_t - alpha_i);
  if (delta == 0.0)
    throw std::invalid_argument("cyclic frequencies must differ");
  if (fs <= std::max(alpha_t, alpha_i))
    throw std::invalid_argument("fs must exceed max cyclic frequency");
  return 10 * static_cast<std::size_t>(std::ceil(fs / delta));
}

FvcRecord fvc_sample(std::span<const CacEstimate> realizations) {
  const int m = static_cast<int>(realizations.size());
  if (m < 2) throw std::invalid_argument("need at least 2 realizations");
  cplx mean(0.0, 0.0);
  double e2 = 0.0;
  for (const auto& r : realizations) {
    mean += r.value;
    e2 += std::norm(r.value);
  }
  mean /= static_cast<double>(m);
  e2 /= static_cast<double>(m);
  double var = 0.0;
  for (const auto& r : realizations) var += std::norm(r.value - mean);
  var /= static_cast<double>(m - 1);
  if (e2 == 0.0) throw std::domain_error("FVC undefined: all realizations zero");
  return {var / e2, m, var, e2, mean};
}

FvcConfidence fvc_confidence(double v_s, double e_s, double sigma_vs2,
                             double sigma_es2, double sigma_vses, int M,
                             double beta) {
  if (M <= 50)
    throw std::invalid_argument("Gaussian approximation requires M > 50");
  if (e_s <= 0.0) throw std::invalid_argument("e_s must be positive");
  const double z = student_t_two_sided(beta, static_cast<double>(M - 1));
  const double q = 1.0 - z * z * sigma_es2 / (e_s * e_s);
  if (q <= 0.0)
    throw std::domain_error(
        "confidence level unattainable at this M (Q <= 0)");
  const double ratio = v_s / e_s;
  const double center = (ratio - z * z * sigma_vses / (e_s * e_s)) / q;
  double inner = sigma_vs2;
  if (sigma_es2 > 0.0) inner -= sigma_vses * sigma_vses / sigma_es2;
  const double s2 = (sigma_vs2 - 2.0 * ratio * sigma_vses +
                     ratio * ratio * sigma_es2 -
                     z * z * (sigma_es2 / (e_s * e_s)) * inner) /
                    (e_s * e_s * q * q);
  return {center, s2 > 0.0 ? std::sqrt(s2) : 0.0, z};
}

SampleStatMoments sample_stat_moments(double var_r, double e_r2,
                                      double var_r2, int M) {
  if (M < 2) throw std::invalid_argument("M must be > 1");
  SampleStatMoments s;
  const double m = static_cast<double>(M);
  s.mu_vs = var_r;
  const double mu4 = 2.0 * var_r * var_r;
  s.sigma_vs2 = (mu4 - (m - 3.0) / (m - 1.0) * var_r * var_r) / m;
  s.mu_es = e_r2;
  s.sigma_es2 = var_r2 / m;
  const double mean_abs2 = std::max(0.0, e_r2 - var_r);  // |E[R]|^2
  const double e_vses =
      (m - 1.0) / m *
      (s.sigma_vs2 + s.mu_vs * s.mu_vs + s.mu_vs * (var_r / m + mean_abs2));
  s.sigma_vses = e_vses - s.mu_vs * s.mu_es;
  return s;
}

int select_M(double var_r, double e_r2, double var_r2, double beta,
             double delta, int m_max) {
  if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
  if (e_r2 <= 0.0) throw std::invalid_argument("E[|R|^2] must be positive");
  delta = std::max(delta, 1e-3);
  double best = std::numeric_limits<double>::infinity();
  for (int m = 51; m <= m_max; ++m) {
    const auto s = sample_stat_moments(var_r, e_r2, var_r2, m);
    double hw;
    try {
      const auto ci = fvc_confidence(s.mu_vs, s.mu_es, s.sigma_vs2,
                                     s.sigma_es2, s.sigma_vses, m, beta);
      hw = ci.z_beta * ci.stderr_;
    } catch (const std::domain_error&) {
      continue;  // Q <= 0 at this M; a larger M shrinks sigma_es
    }
    best = std::min(best, hw);
    if (hw < delta) return m;
  }
  throw std::domain_error("no M <= " + std::to_string(m_max) +
                          " meets the bound; best halfwidth " +
                          std::to_string(best));
}

namespace {

// Regularized incomplete beta function by continued fraction.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double betai(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                             std::lgamma(b) + a * std::log(x) +
                             b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double nu) {
  const double x = nu / (nu + t * t);
  const double p = 0.5 * betai(nu / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - p : p;
}

}  // namespace

double student_t_quantile(double p, double nu) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("p must be in (0,1)");
  if (nu <= 0.0) throw std::invalid_argument("nu must be positive");
  double lo = -1e8, hi = 1e8;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, nu) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) break;
  }
  return 0.5 * (lo + hi);
}

double student_t_two_sided(double beta, double nu) {
  return student_t_quantile(0.5 * (1.0 + beta), nu);
}

}  // namespace cwcl
