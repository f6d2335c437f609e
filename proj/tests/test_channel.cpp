#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "cwcl/channel.hpp"
#include "cwcl/signals.hpp"
#include "doctest.h"

using namespace cwcl;

TEST_CASE("log-distance path loss") {
  // At d = d0 the path loss term vanishes.
  CHECK(received_power_db(10.0, {0, 0}, {1, 0}, 3.8, 1.0, 0.0) ==
        doctest::Approx(10.0).epsilon(1e-12));
  // One decade of distance costs 10*gamma dB.
  CHECK(received_power_db(10.0, {0, 0}, {10, 0}, 3.8, 1.0, 0.0) ==
        doctest::Approx(10.0 - 38.0).epsilon(1e-12));
  // Shadowing subtracts in dB.
  CHECK(received_power_db(10.0, {0, 0}, {10, 0}, 3.8, 1.0, 2.5) ==
        doctest::Approx(10.0 - 38.0 - 2.5).epsilon(1e-12));
  CHECK_THROWS_AS(received_power_db(10.0, {0, 0}, {0, 0}, 3.8, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("noise variance from PSD") {
  NetworkScenario sc;
  sc.noise_psd_dbm_hz = -174.0;
  sc.fs = 200e6;
  // -174 dBm/Hz over fs/2 = 100 MHz -> -174 + 80 = -94 dBm.
  CHECK(mw_to_dbm(sc.noise_var_mw()) == doctest::Approx(-94.0).epsilon(1e-9));
}

TEST_CASE("shadowing draws have the configured scale") {
  Rng rng(77);
  const auto q = draw_shadowing(6.0, 20000, rng);
  double mean = 0.0, var = 0.0;
  for (const double v : q) mean += v;
  mean /= static_cast<double>(q.size());
  for (const double v : q) var += (v - mean) * (v - mean);
  var /= static_cast<double>(q.size() - 1);
  CHECK(mean == doctest::Approx(0.0).epsilon(0.2));
  CHECK(std::abs(mean) < 0.2);
  CHECK(std::sqrt(var) == doctest::Approx(6.0).epsilon(0.05));
  // sigma = 0 is exactly zero.
  Rng rng2(1);
  for (const double v : draw_shadowing(0.0, 10, rng2)) CHECK(v == 0.0);
}

TEST_CASE("scenario validation") {
  NetworkScenario sc;
  sc.cr_locs = {{10, 10}};
  CHECK_NOTHROW(sc.validate());
  sc.interferer_loc = sc.target_loc;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = {};
  sc.cr_locs = {{60, 0}};  // outside the 100 m square
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc = {};
  sc.cr_locs.clear();
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("noise buffer statistics") {
  Rng rng(5);
  const auto w = gen_noise(50000, 1.0, 2.0, rng);
  double p = 0.0;
  cplx mean(0, 0);
  for (const auto& s : w.samples) {
    p += std::norm(s);
    mean += s;
  }
  p /= static_cast<double>(w.size());
  mean /= static_cast<double>(w.size());
  CHECK(p == doctest::Approx(2.0).epsilon(0.03));
  CHECK(std::abs(mean) < 0.02);
}

TEST_CASE("compose_received mixes with sqrt powers") {
  SampleBuffer st{{cplx(1, 0), cplx(1, 0)}, 1.0};
  SampleBuffer si{{cplx(0, 1), cplx(0, 1)}, 1.0};
  SampleBuffer w{{cplx(0, 0), cplx(0, 0)}, 1.0};
  // p_t = 20 dBm = 100 mW, p_i = 10 dBm = 10 mW.
  const auto r = compose_from_parts(st, si, w, 20.0, 10.0);
  CHECK(r.samples[0].real() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(r.samples[0].imag() ==
        doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
  // -inf disables a branch.
  const double ninf = -std::numeric_limits<double>::infinity();
  const auto r2 = compose_from_parts(st, si, w, 20.0, ninf);
  CHECK(r2.samples[0].imag() == 0.0);
}

TEST_CASE("tap profile normalizes to unit power") {
  TapProfile prof({{0.0, 0.0}, {1e-6, -3.0}}, Fading::Static);
  double total = 0.0;
  for (const double p : prof.power_linear) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(TapProfile({}, Fading::Static), std::invalid_argument);
  CHECK_THROWS_AS(TapProfile({{1e-6, 0.0}, {0.0, 0.0}}, Fading::Static),
                  std::invalid_argument);
}

TEST_CASE("multipath keeps unit average power") {
  const auto spec = SignalSpec::single_carrier(20e6, 4, 0.5);
  Rng rng(3);
  const auto sig = gen_single_carrier(spec, 2000, 200e6, rng);
  TapProfile prof({{0.0, 0.0}, {3.0 / 200e6, -3.0}, {7.0 / 200e6, -6.0}},
                  Fading::RayleighPerTrial);
  Rng frng(4);
  const auto out = apply_multipath(sig, prof, frng);
  double p = 0.0;
  for (const auto& s : out.samples) p += std::norm(s);
  p /= static_cast<double>(out.size());
  CHECK(p == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("single-tap static multipath is the identity") {
  const auto spec = SignalSpec::single_carrier(20e6, 4, 0.5);
  Rng rng(8);
  const auto sig = gen_single_carrier(spec, 500, 200e6, rng);
  TapProfile prof({{0.0, 0.0}}, Fading::Static);
  Rng frng(9);
  const auto out = apply_multipath(sig, prof, frng);
  double sig_p = 0.0;
  for (const auto& s : sig.samples) sig_p += std::norm(s);
  sig_p /= static_cast<double>(sig.size());
  const double scale = 1.0 / std::sqrt(sig_p);
  for (std::size_t n = 0; n < sig.size(); ++n)
    CHECK(std::abs(out.samples[n] - scale * sig.samples[n]) < 1e-9);
}

TEST_CASE("deterministic streams reproduce draws") {
  Rng a = Rng::derive(123, 1, 2, 3);
  Rng b = Rng::derive(123, 1, 2, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  Rng c = Rng::derive(123, 1, 2, 4);
  bool same = true;
  Rng a2 = Rng::derive(123, 1, 2, 3);
  for (int i = 0; i < 100; ++i) same = same && a2.uniform() == c.uniform();
  CHECK_FALSE(same);
}
