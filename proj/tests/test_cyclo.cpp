#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <vector>

#include "cwcl/channel.hpp"
#include "cwcl/cyclo.hpp"
#include "cwcl/rng.hpp"
#include "cwcl/signals.hpp"
#include "doctest.h"

using namespace cwcl;

namespace {

SampleBuffer constant_buffer(std::size_t n, double fs, cplx value) {
  SampleBuffer b;
  b.sample_rate = fs;
  b.samples.assign(n, value);
  return b;
}

}  // namespace

TEST_CASE("cac of a constant-power signal") {
  const auto b = constant_buffer(1000, 100.0, cplx(std::sqrt(3.0), 0.0));
  CHECK(std::abs(cac(b, 0.0).value - cplx(3.0, 0.0)) < 1e-12);
  // alpha*N*Ts integer, alpha*Ts non-integer: geometric-sum null.
  CHECK(std::abs(cac(b, 7.0 * 100.0 / 1000.0).value) < 1e-9);
}

TEST_CASE("cac picks out a cosine line in |r|^2") {
  const std::size_t n = 2000;
  const double fs = 100.0;
  const double alpha0 = fs * 10.0 / static_cast<double>(n);  // integer cycles
  SampleBuffer b;
  b.sample_rate = fs;
  b.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double inst =
        1.0 + std::cos(2.0 * M_PI * alpha0 * static_cast<double>(i) / fs);
    b.samples[i] = cplx(std::sqrt(inst), 0.0);
  }
  const auto r = cac(b, alpha0);
  CHECK(std::abs(r.value - cplx(0.5, 0.0)) < 1e-6);
}

TEST_CASE("ccc basics") {
  Rng rng(3);
  SampleBuffer u, z;
  u.sample_rate = z.sample_rate = 50.0;
  for (int i = 0; i < 400; ++i) {
    u.samples.emplace_back(rng.gaussian(), rng.gaussian());
    z.samples.emplace_back(0.0, 0.0);
  }
  CHECK(std::abs(ccc(u, z, 7.0).value) == 0.0);
  // ccc(u, u, alpha) = 2 cac(u, alpha) exactly.
  const auto lhs = ccc(u, u, 7.0).value;
  const auto rhs = 2.0 * cac(u, 7.0).value;
  CHECK(std::abs(lhs - rhs) < 1e-12);
  SampleBuffer short_v = z;
  short_v.samples.pop_back();
  CHECK_THROWS_AS(ccc(u, short_v, 1.0), std::invalid_argument);
}

TEST_CASE("conjugate symmetry in alpha") {
  Rng rng(11);
  SampleBuffer b;
  b.sample_rate = 10.0;
  for (int i = 0; i < 257; ++i)
    b.samples.emplace_back(rng.gaussian(), rng.gaussian());
  const auto plus = cac(b, 1.7).value;
  const auto minus = cac(b, -1.7).value;
  CHECK(std::abs(minus - std::conj(plus)) < 1e-10);
}

TEST_CASE("independent cross terms decay like 1/sqrt(N)") {
  const auto spec = SignalSpec::single_carrier(20e6, 4, 0.5);
  double mean_small = 0.0, mean_big = 0.0;
  for (int s = 0; s < 200; ++s) {
    Rng rng_u(1000 + s), rng_v(5000 + s);
    const auto u = gen_single_carrier(spec, 1600, 200e6, rng_u);
    const auto v = gen_single_carrier(spec, 1600, 200e6, rng_v);
    SampleBuffer u100 = u, v100 = v;
    u100.samples.resize(100);
    v100.samples.resize(100);
    mean_small += std::abs(ccc(u100, v100, 20e6).value);
    mean_big += std::abs(ccc(u, v, 20e6).value);
  }
  mean_small /= 200.0;
  mean_big /= 200.0;
  // 16x more samples should shrink the magnitude roughly 4x.
  CHECK(mean_big < mean_small / 2.5);
  CHECK(mean_big > mean_small / 6.5);
}

TEST_CASE("decomposition identity against the composed signal") {
  const auto spec_t = SignalSpec::single_carrier(20e6, 4, 0.5);
  const auto spec_i = SignalSpec::single_carrier(25e6, 4, 0.5);
  for (int s = 0; s < 20; ++s) {
    Rng rt(10 + s), ri(900 + s), rw(1800 + s);
    const auto st = gen_single_carrier(spec_t, 500, 200e6, rt);
    const auto si = gen_single_carrier(spec_i, 500, 200e6, ri);
    const auto w = gen_noise(500, 200e6, 1e-9, rw);
    const double p_tk = -40.0 + s, p_ik = -45.0;
    const auto direct =
        cac(compose_from_parts(st, si, w, p_tk, p_ik), 20e6).value;
    const auto expanded = decompose_cac(st, si, w, p_tk, p_ik, 20e6).value;
    CHECK(std::abs(direct - expanded) <= 1e-10 * std::abs(direct));
  }
}

TEST_CASE("decomposition edge cases") {
  const auto spec_t = SignalSpec::single_carrier(20e6, 4, 0.5);
  Rng rt(1);
  const auto st = gen_single_carrier(spec_t, 400, 200e6, rt);
  const auto zero = constant_buffer(400, 200e6, cplx(0, 0));
  const double ninf = -std::numeric_limits<double>::infinity();
  // noiseless, interference-free: p_tk * R_st exactly.
  const auto got = decompose_cac(st, zero, zero, 0.0, ninf, 20e6).value;
  const auto want = cac(st, 20e6).value;  // p_tk = 0 dBm = 1 mW
  CHECK(std::abs(got - want) < 1e-12);
  // p_tk = p_ik = 0 (linear): noise only.
  Rng rw(2);
  const auto w = gen_noise(400, 200e6, 1.0, rw);
  const auto only_w = decompose_cac(zero, zero, w, ninf, ninf, 20e6).value;
  CHECK(std::abs(only_w - cac(w, 20e6).value) < 1e-12);
}

TEST_CASE("min_samples") {
  CHECK(min_samples(200e6, 20e6, 25e6) == 400);
  CHECK(min_samples(500e3, 250e3, 14e3) == 30);
  CHECK(min_samples(100.0, 30.0, 20.0) == 100);
  CHECK_THROWS_AS(min_samples(100.0, 30.0, 30.0), std::invalid_argument);
  CHECK_THROWS_AS(min_samples(10.0, 30.0, 20.0), std::invalid_argument);
}

TEST_CASE("sample FVC definition and bounds") {
  std::vector<CacEstimate> reals;
  for (int i = 0; i < 10; ++i) reals.push_back({cplx(2.0, -1.0), 1.0, 10});
  const auto r = fvc_sample(reals);
  CHECK(r.phi_hat == doctest::Approx(0.0).epsilon(1e-12));
  // e_s = ((M-1)/M) v_s + |m_s|^2 exactly.
  CHECK(r.e_s ==
        doctest::Approx(9.0 / 10.0 * r.v_s + std::norm(r.m_s)).epsilon(1e-12));

  std::vector<CacEstimate> pm = {{cplx(1.0, 0.0), 1.0, 10},
                                 {cplx(-1.0, 0.0), 1.0, 10}};
  CHECK(fvc_sample(pm).phi_hat == doctest::Approx(2.0).epsilon(1e-12));

  Rng rng(17);
  for (int rep = 0; rep < 1000; ++rep) {
    const int m = 2 + static_cast<int>(rng.integer(20));
    std::vector<CacEstimate> rs;
    for (int i = 0; i < m; ++i)
      rs.push_back({cplx(rng.gaussian(), rng.gaussian()), 1.0, 16});
    const auto f = fvc_sample(rs);
    CHECK(f.phi_hat >= -1e-12);
    CHECK(f.phi_hat <= static_cast<double>(m) / (m - 1) + 1e-12);
    CHECK(f.e_s == doctest::Approx((m - 1.0) / m * f.v_s + std::norm(f.m_s))
                       .epsilon(1e-9));
  }

  std::vector<CacEstimate> one = {{cplx(1.0, 0.0), 1.0, 4}};
  CHECK_THROWS_AS(fvc_sample(one), std::invalid_argument);
  std::vector<CacEstimate> zeros = {{cplx(0, 0), 1.0, 4},
                                    {cplx(0, 0), 1.0, 4}};
  CHECK_THROWS_AS(fvc_sample(zeros), std::domain_error);
}

TEST_CASE("student-t quantiles") {
  // Textbook values.
  CHECK(student_t_quantile(0.975, 10.0) ==
        doctest::Approx(2.2281).epsilon(1e-3));
  CHECK(student_t_quantile(0.95, 59.0) ==
        doctest::Approx(1.6711).epsilon(1e-3));
  // Large nu converges to the normal quantile.
  CHECK(student_t_quantile(0.975, 1e6) ==
        doctest::Approx(1.959964).epsilon(1e-4));
  CHECK(student_t_two_sided(0.9, 59.0) ==
        doctest::Approx(student_t_quantile(0.95, 59.0)).epsilon(1e-12));
  CHECK_THROWS_AS(student_t_quantile(0.0, 5.0), std::invalid_argument);
}

TEST_CASE("confidence interval limits") {
  // Degenerate denominator statistics: C -> v_s/e_s, S^2 -> sigma_vs^2/e_s^2.
  const auto ci = fvc_confidence(0.3, 2.0, 1e-6, 0.0, 0.0, 60, 0.9);
  CHECK(ci.center == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(ci.stderr_ == doctest::Approx(std::sqrt(1e-6) / 2.0).epsilon(1e-9));
  CHECK_THROWS_AS(fvc_confidence(0.3, 2.0, 1e-6, 0.0, 0.0, 50, 0.9),
                  std::invalid_argument);
  // Huge sigma_es makes Q <= 0.
  CHECK_THROWS_AS(fvc_confidence(0.3, 2.0, 1e-6, 100.0, 0.0, 60, 0.9),
                  std::domain_error);
}

TEST_CASE("sample-statistic moments against a batch oracle") {
  // Known complex Gaussian R: mean mu, total variance var (half per part).
  const cplx mu(0.7, -0.4);
  const double var = 0.5;
  const double e_r2 = var + std::norm(mu);
  const double var_r2 = [&] {
    // var(|R|^2) for complex Gaussian with independent parts of variance
    // var/2: 2*(var/2)^2 * 2 + 4 * |mu|^2 * var/2 ... use the quadform rule
    // with A = I_2, Sigma = (var/2) I_2.
    const double s = var / 2.0;
    return 2.0 * (2.0 * s * s) + 4.0 * std::norm(mu) * s;
  }();
  const int m = 60;
  const auto th = sample_stat_moments(var, e_r2, var_r2, m);

  const int batches = 20000;
  Rng rng(99);
  double sum_vs = 0, sum_vs2 = 0, sum_es = 0, sum_es2 = 0, sum_ves = 0;
  for (int b = 0; b < batches; ++b) {
    std::vector<CacEstimate> rs(m);
    for (int i = 0; i < m; ++i)
      rs[static_cast<std::size_t>(i)] = {
          mu + std::sqrt(var / 2.0) * cplx(rng.gaussian(), rng.gaussian()),
          1.0, 8};
    const auto f = fvc_sample(rs);
    sum_vs += f.v_s;
    sum_vs2 += f.v_s * f.v_s;
    sum_es += f.e_s;
    sum_es2 += f.e_s * f.e_s;
    sum_ves += f.v_s * f.e_s;
  }
  const double nb = batches;
  const double m_vs = sum_vs / nb, m_es = sum_es / nb;
  const double v_vs = sum_vs2 / nb - m_vs * m_vs;
  const double v_es = sum_es2 / nb - m_es * m_es;
  const double c_ves = sum_ves / nb - m_vs * m_es;

  CHECK(m_vs == doctest::Approx(th.mu_vs).epsilon(0.02));
  CHECK(m_es == doctest::Approx(th.mu_es).epsilon(0.02));
  CHECK(v_vs == doctest::Approx(th.sigma_vs2).epsilon(0.1));
  CHECK(v_es == doctest::Approx(th.sigma_es2).epsilon(0.1));
  CHECK(c_ves == doctest::Approx(th.sigma_vses).epsilon(0.15));

  // Consistency: all variances vanish as M grows.
  const auto big = sample_stat_moments(var, e_r2, var_r2, 1000000);
  CHECK(big.sigma_vs2 < 1e-5);
  CHECK(big.sigma_es2 < 1e-5);
  CHECK(std::abs(big.sigma_vses) < 1e-5);
  // var(R) = 0 kills every variance output.
  const auto det = sample_stat_moments(0.0, std::norm(mu), 0.0, 60);
  CHECK(det.sigma_vs2 == 0.0);
  CHECK(det.sigma_es2 == 0.0);
  CHECK(det.sigma_vses == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("select_M") {
  // Loose target: the first admissible M.
  CHECK(select_M(0.1, 1.0, 0.05, 0.9, 1.0) == 51);
  // Tightening delta never lowers the required M.
  const int m1 = select_M(0.1, 1.0, 0.05, 0.9, 0.05);
  const int m2 = select_M(0.1, 1.0, 0.05, 0.9, 0.025);
  CHECK(m2 >= m1);
  CHECK_THROWS_AS(select_M(0.1, 1.0, 0.05, 0.9, -1.0), std::invalid_argument);
}
