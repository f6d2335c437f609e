#include "cwcl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cwcl {

void NetworkScenario::validate() const {
  if (distance(target_loc, interferer_loc) <= 0.0)
    throw std::invalid_argument("target and interferer locations must differ");
  if (cr_locs.empty()) throw std::invalid_argument("need at least one CR");
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  if (d0 <= 0.0) throw std::invalid_argument("d0 must be positive");
  if (sigma_q_db < 0.0) throw std::invalid_argument("sigma_q_db must be >= 0");
  if (fs <= 0.0) throw std::invalid_argument("fs must be positive");
  for (const auto& cr : cr_locs) {
    if (std::abs(cr.x - target_loc.x) > side_a / 2.0 + 1e-9 ||
        std::abs(cr.y - target_loc.y) > side_a / 2.0 + 1e-9)
      throw std::invalid_argument("CR outside the deployment square");
    if (distance(cr, target_loc) <= 0.0 || distance(cr, interferer_loc) <= 0.0)
      throw std::invalid_argument("CR colocated with a transmitter");
  }
}

TapProfile::TapProfile(std::vector<Tap> taps_in, Fading fading_in,
                       double doppler_hz_in)
    : taps(std::move(taps_in)), doppler_hz(doppler_hz_in), fading(fading_in) {
  if (taps.empty()) throw std::invalid_argument("tap profile must be non-empty");
  for (std::size_t i = 1; i < taps.size(); ++i)
    if (taps[i].delay_s < taps[i - 1].delay_s)
      throw std::invalid_argument("tap delays must be non-decreasing");
  double total = 0.0;
  power_linear.resize(taps.size());
  for (std::size_t i = 0; i < taps.size(); ++i) {
    power_linear[i] = dbm_to_mw(taps[i].avg_power_db);  // dB relative
    total += power_linear[i];
  }
  for (auto& p : power_linear) p /= total;
}

double received_power_db(double p_tx_dbm, const Vec2& tx_loc,
                         const Vec2& rx_loc, double gamma, double d0,
                         double shadow_db) {
  const double d = distance(tx_loc, rx_loc);
  if (d <= 0.0)
    throw std::invalid_argument("zero transmitter-receiver distance");
  return p_tx_dbm - 10.0 * gamma * std::log10(d / d0) - shadow_db;
}

std::vector<double> draw_shadowing(double sigma_q_db, std::size_t K, Rng& rng) {
  if (sigma_q_db < 0.0) throw std::invalid_argument("sigma_q_db must be >= 0");
  std::vector<double> q(K);
  for (auto& v : q) v = sigma_q_db * rng.gaussian();
  return q;
}

SampleBuffer apply_multipath(const SampleBuffer& sig, const TapProfile& profile,
                             Rng& rng) {
  if (profile.taps.empty()) throw std::invalid_argument("empty tap profile");
  const double duration = sig.size() / sig.sample_rate;
  if (profile.taps.back().delay_s >= duration)
    throw std::invalid_argument("tap delay exceeds buffer duration");

  // One coefficient per tap, delays snapped to the sample grid.
  std::vector<std::pair<std::size_t, cplx>> coeffs;
  coeffs.reserve(profile.taps.size());
  for (std::size_t i = 0; i < profile.taps.size(); ++i) {
    const auto lag = static_cast<std::size_t>(
        std::llround(profile.taps[i].delay_s * sig.sample_rate));
    cplx h;
    if (profile.fading == Fading::RayleighPerTrial) {
      const double s = std::sqrt(profile.power_linear[i] / 2.0);
      h = cplx(s * rng.gaussian(), s * rng.gaussian());
    } else {
      h = cplx(std::sqrt(profile.power_linear[i]), 0.0);
    }
    coeffs.emplace_back(lag, h);
  }

  SampleBuffer out;
  out.sample_rate = sig.sample_rate;
  out.samples.assign(sig.size(), cplx(0.0, 0.0));
  for (const auto& [lag, h] : coeffs)
    for (std::size_t n = lag; n < sig.size(); ++n)
      out.samples[n] += h * sig.samples[n - lag];

  double power = 0.0;
  for (const auto& s : out.samples) power += std::norm(s);
  power /= static_cast<double>(out.size());
  if (power > 0.0) {
    const double scale = 1.0 / std::sqrt(power);
    for (auto& s : out.samples) s *= scale;
  }
  return out;
}

SampleBuffer gen_noise(std::size_t n_samples, double fs,
                       double noise_var_linear, Rng& rng) {
  SampleBuffer w;
  w.sample_rate = fs;
  w.samples.resize(n_samples);
  const double s = std::sqrt(noise_var_linear / 2.0);
  for (auto& v : w.samples) v = cplx(s * rng.gaussian(), s * rng.gaussian());
  return w;
}

SampleBuffer compose_from_parts(const SampleBuffer& st, const SampleBuffer& si,
                                const SampleBuffer& w, double p_tk_dbm,
                                double p_ik_dbm) {
  if (st.size() != si.size() || st.size() != w.size())
    throw std::invalid_argument("component buffer length mismatch");
  const double at = std::isinf(p_tk_dbm) && p_tk_dbm < 0
                        ? 0.0
                        : std::sqrt(dbm_to_mw(p_tk_dbm));
  const double ai = std::isinf(p_ik_dbm) && p_ik_dbm < 0
                        ? 0.0
                        : std::sqrt(dbm_to_mw(p_ik_dbm));
  SampleBuffer r;
  r.sample_rate = st.sample_rate;
  r.samples.resize(st.size());
  for (std::size_t n = 0; n < st.size(); ++n)
    r.samples[n] = at * st.samples[n] + ai * si.samples[n] + w.samples[n];
  return r;
}

SampleBuffer compose_received(const SampleBuffer& st, const SampleBuffer& si,
                              double p_tk_dbm, double p_ik_dbm,
                              double noise_var_linear, Rng& rng) {
  if (st.size() != si.size())
    throw std::invalid_argument("signal buffer length mismatch");
  const auto w = gen_noise(st.size(), st.sample_rate, noise_var_linear, rng);
  return compose_from_parts(st, si, w, p_tk_dbm, p_ik_dbm);
}

}  // namespace cwcl
