#include "cwcl/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace cwcl::theory {

Vec6 build_power_vector(double p_tk, double p_ik) {
  if (p_tk < 0.0 || p_ik < 0.0)
    throw std::invalid_argument("powers must be nonnegative");
  Vec6 p;
  p << p_tk, p_ik, std::sqrt(p_tk * p_ik), 1.0, std::sqrt(p_tk),
      std::sqrt(p_ik);
  return p;
}

QuadFormSet build_quadforms(std::span<const double> p_t_lin,
                            std::span<const double> p_i_lin,
                            std::span<const Vec2> cr_locs,
                            std::span<const int> s0) {
  const std::size_t k = cr_locs.size();
  if (k == 0 || p_t_lin.size() != k || p_i_lin.size() != k)
    throw std::invalid_argument("input size mismatch");
  QuadFormSet q;
  q.s0.assign(k, 1);
  if (!s0.empty()) {
    if (s0.size() != k) throw std::invalid_argument("selection size mismatch");
    q.s0.assign(s0.begin(), s0.end());
  }
  if (std::none_of(q.s0.begin(), q.s0.end(), [](int v) { return v != 0; }))
    throw std::invalid_argument("selection excludes every CR");

  q.P.resize(6, static_cast<Eigen::Index>(k));
  q.x.resize(static_cast<Eigen::Index>(k));
  q.y.resize(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    q.P.col(static_cast<Eigen::Index>(i)) =
        build_power_vector(p_t_lin[i], p_i_lin[i]);
    q.x(static_cast<Eigen::Index>(i)) = cr_locs[i].x;
    q.y(static_cast<Eigen::Index>(i)) = cr_locs[i].y;
  }

  Eigen::VectorXd sel(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i)
    sel(static_cast<Eigen::Index>(i)) = q.s0[i] ? 1.0 : 0.0;

  const Eigen::MatrixXd psx =
      q.P * (sel.array() * q.x.array()).matrix().asDiagonal() * q.P.transpose();
  const Eigen::MatrixXd psy =
      q.P * (sel.array() * q.y.array()).matrix().asDiagonal() * q.P.transpose();
  const Eigen::MatrixXd psb = q.P * sel.asDiagonal() * q.P.transpose();
  q.A_x.block<6, 6>(0, 0) = psx;
  q.A_x.block<6, 6>(6, 6) = psx;
  q.A_y.block<6, 6>(0, 0) = psy;
  q.A_y.block<6, 6>(6, 6) = psy;
  q.B.block<6, 6>(0, 0) = psb;
  q.B.block<6, 6>(6, 6) = psb;
  return q;
}

namespace {

// Second-order description of one transmitted component on the sample grid.
// A single-carrier rectangular-pulse signal is the nc = 1, delta_f = 0 case
// of the OFDM model, so one structure covers both.
struct CompModel {
  std::vector<double> amp2;  // E[|s(n)|^2]
  std::vector<long> sym;     // symbol index per sample
  std::vector<double> t;     // absolute time per sample
  int nc = 1;
  double delta_f = 0.0;
  double fc = 0.0;
  double m4 = 2.0;     // E[|c|^4] of the constellation
  cplx s2c{0.0, 0.0};  // E[c^2]

  // (1/nc) sum over subcarriers of exp(j * kappa * x); kappa integer from
  // -(nc/2) for nc terms.
  cplx dirichlet(double x) const {
    if (nc == 1) return {1.0, 0.0};
    const double half = std::sin(0.5 * x);
    double ratio;
    if (std::abs(half) < 1e-12) {
      ratio = static_cast<double>(nc) * std::cos(0.5 * nc * x) /
              std::cos(0.5 * x);
    } else {
      ratio = std::sin(0.5 * nc * x) / half;
    }
    const double phase = (-(nc / 2) + 0.5 * (nc - 1)) * x;
    return std::polar(ratio / nc, phase);
  }

  cplx d_minus(std::size_t n, std::size_t m) const {
    return dirichlet(2.0 * M_PI * delta_f * (t[n] - t[m]));
  }
  cplx d_plus(std::size_t n, std::size_t m) const {
    return dirichlet(2.0 * M_PI * delta_f * (t[n] + t[m]));
  }

  // E[s(n) s*(m)]
  cplx corr(std::size_t n, std::size_t m) const {
    if (sym[n] != sym[m]) return {0.0, 0.0};
    const double a = std::sqrt(amp2[n] * amp2[m]);
    if (a == 0.0) return {0.0, 0.0};
    return a * d_minus(n, m) *
           std::polar(1.0, 2.0 * M_PI * fc * (t[n] - t[m]));
  }

  // E[s(n) s(m)] (pseudo-correlation)
  cplx pseudo(std::size_t n, std::size_t m) const {
    if (sym[n] != sym[m] || (s2c.real() == 0.0 && s2c.imag() == 0.0))
      return {0.0, 0.0};
    const double a = std::sqrt(amp2[n] * amp2[m]);
    if (a == 0.0) return {0.0, 0.0};
    return a * s2c * d_plus(n, m) *
           std::polar(1.0, 2.0 * M_PI * fc * (t[n] + t[m]));
  }

  // cov(|s(n)|^2, |s(m)|^2)
  double cov_power(std::size_t n, std::size_t m) const {
    if (sym[n] != sym[m]) return 0.0;
    const double aa = amp2[n] * amp2[m];
    if (aa == 0.0) return 0.0;
    const double abs2_s2c = std::norm(s2c);
    const double dm = std::norm(d_minus(n, m));
    const double dp = abs2_s2c > 0.0 ? std::norm(d_plus(n, m)) : 0.0;
    return aa * (dm + abs2_s2c * dp +
                 (m4 - 2.0 - abs2_s2c) / static_cast<double>(nc));
  }
};

CompModel make_model(const SignalSpec& spec, std::size_t n_samples,
                     double fs) {
  spec.validate();
  if (spec.kind == SignalKind::SingleCarrier &&
      spec.pulse != PulseKind::Rectangular)
    throw std::invalid_argument(
        "analytic moments support rectangular pulses only");
  CompModel m;
  m.fc = spec.carrier_freq;
  m.m4 = qam_fourth_moment(spec.modulation_order);
  m.s2c = qam_second_moment(spec.modulation_order);
  if (spec.kind == SignalKind::Ofdm) {
    m.nc = spec.num_subcarriers;
    m.delta_f = spec.subcarrier_spacing;
  }
  const double tg = spec.symbol_period;
  m.amp2.resize(n_samples);
  m.sym.resize(n_samples);
  m.t.resize(n_samples);
  double mean_on = 0.0;
  std::vector<char> on(n_samples);
  // The time grid must reproduce the synthesizer's floating-point
  // arithmetic exactly (t = n * (1/fs), same window predicate); otherwise
  // one-ulp differences flip samples at symbol boundaries and the
  // deterministic part of the mean drifts by O(1/N).
  const double ts = 1.0 / fs;
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) * ts;
    const long l = static_cast<long>(std::floor(t / tg));
    const double tau = t - static_cast<double>(l) * tg;
    m.t[n] = t;
    m.sym[n] = l;
    if (spec.kind == SignalKind::SingleCarrier)
      on[n] = (tau >= 0.0 && tau < spec.duty * tg) ? 1 : 0;
    else
      on[n] = tau < spec.duty * tg ? 1 : 0;
    mean_on += on[n];
  }
  mean_on /= static_cast<double>(n_samples);
  if (mean_on <= 0.0)
    throw std::invalid_argument("signal window covers no sample");
  for (std::size_t n = 0; n < n_samples; ++n)
    m.amp2[n] = on[n] ? 1.0 / mean_on : 0.0;
  return m;
}

struct Block2 {
  double mr = 0.0, mi = 0.0;          // mean (Re, Im)
  double rr = 0.0, ri = 0.0, ii = 0.0;  // covariance entries
};

}  // namespace

ThetaStats theta_moments(const SignalSpec& spec_t, const SignalSpec& spec_i,
                         std::size_t N, double fs, double sigma_w2) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (sigma_w2 < 0.0) throw std::invalid_argument("sigma_w2 must be >= 0");
  const CompModel mt = make_model(spec_t, N, fs);
  const CompModel mi = make_model(spec_i, N, fs);

  const double omega = 2.0 * M_PI * spec_t.cyclic_frequency() / fs;
  std::vector<double> c(N), s(N);
  for (std::size_t n = 0; n < N; ++n) {
    c[n] = std::cos(omega * static_cast<double>(n));
    s[n] = std::sin(omega * static_cast<double>(n));
  }
  const double inv_n = 1.0 / static_cast<double>(N);
  const double inv_n2 = inv_n * inv_n;

  auto mean_of = [&](auto&& mq) {
    double mr = 0.0, mi_ = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const double v = mq(n);
      mr += v * c[n];
      mi_ -= v * s[n];
    }
    return std::pair<double, double>(mr * inv_n, mi_ * inv_n);
  };

  // Dense O(N^2) accumulation of the 2x2 Re/Im covariance of one component
  // from its symmetric power-sequence covariance kernel. Kernels vanish
  // across symbol boundaries, so only same-symbol pairs are visited.
  auto cov_dense = [&](const std::vector<long>& sym, auto&& kernel) {
    Block2 b;
    std::size_t n0 = 0;
    while (n0 < N) {
      std::size_t n1 = n0 + 1;
      while (n1 < N && sym[n1] == sym[n0]) ++n1;
      for (std::size_t n = n0; n < n1; ++n)
        for (std::size_t m = n0; m < n1; ++m) {
          const double kv = kernel(n, m);
          if (kv == 0.0) continue;
          b.rr += kv * c[n] * c[m];
          b.ri -= kv * c[n] * s[m];
          b.ii += kv * s[n] * s[m];
        }
      n0 = n1;
    }
    b.rr *= inv_n2;
    b.ri *= inv_n2;
    b.ii *= inv_n2;
    return b;
  };

  // Diagonal (delta_{nm}) kernels need only an O(N) pass.
  auto cov_diag = [&](auto&& kernel) {
    Block2 b;
    for (std::size_t n = 0; n < N; ++n) {
      const double kv = kernel(n);
      b.rr += kv * c[n] * c[n];
      b.ri -= kv * c[n] * s[n];
      b.ii += kv * s[n] * s[n];
    }
    b.rr *= inv_n2;
    b.ri *= inv_n2;
    b.ii *= inv_n2;
    return b;
  };

  Block2 blocks[6];

  blocks[0] = cov_dense(mt.sym,
                        [&](std::size_t n, std::size_t m) {
                          return mt.cov_power(n, m);
                        });
  std::tie(blocks[0].mr, blocks[0].mi) =
      mean_of([&](std::size_t n) { return mt.amp2[n]; });

  blocks[1] = cov_dense(mi.sym,
                        [&](std::size_t n, std::size_t m) {
                          return mi.cov_power(n, m);
                        });
  std::tie(blocks[1].mr, blocks[1].mi) =
      mean_of([&](std::size_t n) { return mi.amp2[n]; });

  // Cross term s_t s_i: q(n) = 2 Re{s_t(n) s_i*(n)}; zero mean; the kernel
  // factors into the two components' correlations. Nonzero only where both
  // samples share a symbol in *both* signals, so iterate over the finer
  // symbol grid of the two.
  {
    std::vector<long> joint(N);
    long code = 0;
    joint[0] = 0;
    for (std::size_t n = 1; n < N; ++n) {
      if (mt.sym[n] != mt.sym[n - 1] || mi.sym[n] != mi.sym[n - 1]) ++code;
      joint[n] = code;
    }
    blocks[2] = cov_dense(joint, [&](std::size_t n, std::size_t m) {
      const cplx ct = mt.corr(n, m);
      const cplx ci = mi.corr(n, m);
      double v = 2.0 * (ct * std::conj(ci)).real();
      const cplx pt = mt.pseudo(n, m);
      if (pt.real() != 0.0 || pt.imag() != 0.0)
        v += 2.0 * (pt * std::conj(mi.pseudo(n, m))).real();
      return v;
    });
  }

  // Noise: q(n) = |w(n)|^2, mean sigma^2, cov delta_{nm} sigma^4.
  blocks[3] = cov_diag(
      [&](std::size_t) { return sigma_w2 * sigma_w2; });
  std::tie(blocks[3].mr, blocks[3].mi) =
      mean_of([&](std::size_t) { return sigma_w2; });

  blocks[4] = cov_diag(
      [&](std::size_t n) { return 2.0 * sigma_w2 * mt.amp2[n]; });
  blocks[5] = cov_diag(
      [&](std::size_t n) { return 2.0 * sigma_w2 * mi.amp2[n]; });

  ThetaStats out;
  out.N = N;
  for (int b = 0; b < 6; ++b) {
    out.mean(b) = blocks[b].mr;
    out.mean(b + 6) = blocks[b].mi;
    out.cov(b, b) = blocks[b].rr;
    out.cov(b, b + 6) = blocks[b].ri;
    out.cov(b + 6, b) = blocks[b].ri;
    out.cov(b + 6, b + 6) = blocks[b].ii;
  }
  return out;
}

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGl = 15;
constexpr double kGlX[kGl] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kGlW[kGl] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

template <typename F>
double gl15(F&& f, double a, double b) {
  const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
  double acc = 0.0;
  for (int i = 0; i < kGl; ++i) acc += kGlW[i] * f(mid + h * kGlX[i]);
  return acc * h;
}

template <typename F>
double adaptive(F&& f, double a, double b, double whole, double tol,
                int depth, int* panels, double* err) {
  const double mid = 0.5 * (a + b);
  const double left = gl15(f, a, mid);
  const double right = gl15(f, mid, b);
  const double delta = left + right - whole;
  *err = std::abs(delta);
  if (depth <= 0 || std::abs(delta) <= tol) {
    ++*panels;
    return left + right;
  }
  return adaptive(f, a, mid, left, 0.5 * tol, depth - 1, panels, err) +
         adaptive(f, mid, b, right, 0.5 * tol, depth - 1, panels, err);
}

}  // namespace

double rqgv_second_moment(const Mat12& A, const Mat12& B,
                          const ThetaStats& stats, QuadDiagnostics* diag) {
  QuadDiagnostics local;
  QuadDiagnostics* d = diag ? diag : &local;
  *d = {};

  Mat12 sigma = 0.5 * (stats.cov + stats.cov.transpose());
  Eigen::LLT<Mat12> llt(sigma);
  if (llt.info() != Eigen::Success) {
    d->jitter = 1e-12 * sigma.trace() / 12.0;
    sigma += d->jitter * Mat12::Identity();
    llt.compute(sigma);
    if (llt.info() != Eigen::Success)
      throw std::domain_error("covariance not positive definite after jitter");
  }
  const Mat12 C = llt.matrixL();

  const Mat12 bt = C.transpose() * B * C;
  Eigen::SelfAdjointEigenSolver<Mat12> es(bt);
  if (es.info() != Eigen::Success)
    throw std::domain_error("eigendecomposition failed");
  Vec12 lambda = es.eigenvalues();
  const double ltr = std::abs(bt.trace());
  for (int i = 0; i < 12; ++i) {
    if (lambda(i) < 0.0) {
      if (lambda(i) < -1e-10 * std::max(ltr, 1e-300))
        throw std::invalid_argument("B is not positive semidefinite");
      lambda(i) = 0.0;
    }
  }
  if (lambda.maxCoeff() <= 0.0)
    throw std::domain_error("denominator quadratic form is identically zero");
  const Mat12 V = es.eigenvectors();
  Mat12 astar = V.transpose() * C.transpose() * A * C * V;
  const Vec12 mu =
      V.transpose() *
      C.triangularView<Eigen::Lower>().solve(stats.mean).eval();

  // The ratio is invariant under (A, B) -> (A/s, B/s) with t -> s*t, so
  // normalize the eigenvalues to O(1); otherwise the integrand's mass sits
  // at t ~ 1/lambda, far outside any fixed quadrature window when the
  // quadratic forms carry physical units.
  const double scale = lambda.maxCoeff();
  lambda /= scale;
  astar /= scale;

  auto integrand = [&](double t) -> double {
    Vec12 dvec;
    double expo = 0.0;
    for (int i = 0; i < 12; ++i) {
      const double g = 1.0 + 2.0 * t * lambda(i);
      dvec(i) = 1.0 / std::sqrt(g);
      // log det term plus 0.5*(|zeta|^2 - |mu|^2) expanded analytically:
      // the direct difference of the two squared norms cancels
      // catastrophically when the whitened mean is large (near-singular
      // covariance), while mu_i^2 * t * lambda_i / g is exact.
      expo -= 0.5 * std::log(g) + mu(i) * mu(i) * t * lambda(i) / g;
    }
    const Mat12 r = dvec.asDiagonal() * astar * dvec.asDiagonal();
    const Vec12 zeta = dvec.cwiseProduct(mu);
    const Vec12 rz = r * zeta;
    const double tr_r = r.trace();
    const double tr_r2 = r.squaredNorm();
    const double zrz = zeta.dot(rz);
    const double zr2z = rz.squaredNorm();
    const double bracket =
        (tr_r + zrz) * (tr_r + zrz) + 2.0 * tr_r2 + 4.0 * zr2z;
    return t * std::exp(expo) * bracket;
  };

  // Geometrically growing panels resolve every 1/lambda_i transition of
  // the multi-scale integrand; each panel spans only a factor of two in t,
  // where the integrand is smooth and a refined 15-point rule converges.
  double lambda_min_pos = 1.0;
  for (int i = 0; i < 12; ++i)
    if (lambda(i) > 0.0) lambda_min_pos = std::min(lambda_min_pos, lambda(i));
  const double t_required = 10.0 / lambda_min_pos;

  double acc = 0.0;
  double err_acc = 0.0;
  double lo = 0.0, hi = 1e-4;
  for (int j = 0; j < 400; ++j) {
    const double coarse = gl15(integrand, lo, hi);
    const double tol =
        std::max({std::abs(acc), std::abs(coarse), 1e-300}) * 1e-10;
    double perr = 0.0;
    const double panel =
        adaptive(integrand, lo, hi, coarse, tol, 24, &d->panels, &perr);
    acc += panel;
    err_acc += perr;
    if (hi >= t_required && std::abs(panel) <= 1e-12 * std::abs(acc)) {
      d->err_estimate = err_acc;
      if (!std::isfinite(acc))
        throw std::domain_error("second-moment integral did not converge");
      return acc;
    }
    lo = hi;
    hi *= 2.0;
  }
  throw std::domain_error("second-moment integral did not converge");
}

double rmse_theoretical(const QuadFormSet& q, const ThetaStats& stats,
                        QuadDiagnostics* diag) {
  QuadDiagnostics dx, dy;
  const double ex2 = rqgv_second_moment(q.A_x, q.B, stats, &dx);
  const double ey2 = rqgv_second_moment(q.A_y, q.B, stats, &dy);
  if (diag) {
    diag->jitter = std::max(dx.jitter, dy.jitter);
    diag->panels = dx.panels + dy.panels;
    diag->err_estimate = std::max(dx.err_estimate, dy.err_estimate);
  }
  return std::sqrt(std::max(0.0, ex2 + ey2));
}

double fvc_theoretical(double rho_k, const ThetaStats& stats) {
  if (rho_k < 0.0) throw std::invalid_argument("rho must be >= 0");
  const double v_t = stats.cov(0, 0) + stats.cov(6, 6);
  const double mean_t2 =
      stats.mean(0) * stats.mean(0) + stats.mean(6) * stats.mean(6);
  const double e_t = v_t + mean_t2;
  const double e_i = stats.cov(1, 1) + stats.cov(7, 7) +
                     stats.mean(1) * stats.mean(1) +
                     stats.mean(7) * stats.mean(7);
  const double e_ti = stats.cov(2, 2) + stats.cov(8, 8);
  const double num = rho_k * rho_k * v_t + e_i + rho_k * e_ti;
  const double den = rho_k * rho_k * e_t + e_i + rho_k * e_ti;
  if (den <= 0.0) throw std::domain_error("zero FVC denominator");
  return num / den;
}

ThresholdResult optimal_threshold(std::span<const Vec2> cr_locs,
                                  std::span<const double> p_t_lin,
                                  std::span<const double> p_i_lin,
                                  const ThetaStats& stats) {
  const std::size_t k = cr_locs.size();
  if (k == 0 || p_t_lin.size() != k || p_i_lin.size() != k)
    throw std::invalid_argument("input size mismatch");
  std::vector<double> phi(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double rho = p_i_lin[i] > 0.0
                           ? p_t_lin[i] / p_i_lin[i]
                           : 1e15;
    phi[i] = fvc_theoretical(rho, stats);
  }
  ThresholdResult out;
  out.candidates = phi;
  std::sort(out.candidates.begin(), out.candidates.end());
  out.candidates.erase(
      std::unique(out.candidates.begin(), out.candidates.end()),
      out.candidates.end());

  out.eps_opt = std::numeric_limits<double>::infinity();
  for (const double phi0 : out.candidates) {
    std::vector<int> s0(k, 0);
    for (std::size_t i = 0; i < k; ++i) s0[i] = phi[i] <= phi0 ? 1 : 0;
    const auto q = build_quadforms(p_t_lin, p_i_lin, cr_locs, s0);
    const double eps = rmse_theoretical(q, stats);
    out.eps.push_back(eps);
    if (eps < out.eps_opt) {  // strict: ties break toward smaller phi0
      out.eps_opt = eps;
      out.phi0_opt = phi0;
    }
  }
  return out;
}

CacMoments cac_quadform_moments(const Vec6& p_k, const ThetaStats& stats) {
  Mat12 a = Mat12::Zero();
  const Eigen::Matrix<double, 6, 6> pp = p_k * p_k.transpose();
  a.block<6, 6>(0, 0) = pp;
  a.block<6, 6>(6, 6) = pp;

  CacMoments out;
  const double re = p_k.dot(stats.mean.head<6>());
  const double im = p_k.dot(stats.mean.tail<6>());
  out.mean = cplx(re, im);
  out.var_r = p_k.dot(stats.cov.block<6, 6>(0, 0) * p_k) +
              p_k.dot(stats.cov.block<6, 6>(6, 6) * p_k);
  const Mat12 as = a * stats.cov;
  out.e_r2 = as.trace() + stats.mean.dot(a * stats.mean);
  out.var_r2 = 2.0 * (as * as).trace() +
               4.0 * stats.mean.dot(a * stats.cov * a * stats.mean);
  return out;
}

double interference_leakage(const SignalSpec& spec_i, std::size_t N,
                            double fs, double alpha_t) {
  if (spec_i.kind == SignalKind::SingleCarrier &&
      spec_i.pulse != PulseKind::Rectangular)
    throw std::invalid_argument("closed form requires a rectangular pulse");
  const double delta = alpha_t - spec_i.cyclic_frequency();
  if (delta == 0.0)
    throw std::invalid_argument("cyclic frequencies coincide");
  const double x = M_PI * delta / fs;
  const double den = static_cast<double>(N) * std::sin(x);
  if (den == 0.0) throw std::invalid_argument("degenerate Dirichlet factor");
  const double r = std::sin(x * static_cast<double>(N)) / den;
  return r * r;
}

}  // namespace cwcl::theory
