#pragma once

#include <vector>

#include "cwcl/rng.hpp"
#include "cwcl/types.hpp"

namespace cwcl {

/// Geometry, power, and propagation parameters of one deployment.
struct NetworkScenario {
  Vec2 target_loc{0.0, 0.0};
  Vec2 interferer_loc{20.0, 20.0};
  std::vector<Vec2> cr_locs;
  double p_t_dbm = 10.0;
  double p_i_dbm = 10.0;
  double gamma = 3.8;               // path-loss exponent
  double d0 = 1.0;                  // reference distance, m
  double sigma_q_db = 0.0;          // shadowing std dev
  double noise_psd_dbm_hz = -174.0;
  double fs = 200e6;                // Hz
  double side_a = 100.0;            // deployment square side, m

  /// Noise power over the observed bandwidth fs/2, linear mW.
  double noise_var_mw() const {
    return dbm_to_mw(noise_psd_dbm_hz) * fs / 2.0;
  }

  void validate() const;  // throws std::invalid_argument
};

enum class Fading { Static, RayleighPerTrial };

struct Tap {
  double delay_s = 0.0;
  double avg_power_db = 0.0;
};

/// Generic tapped-delay-line profile; tap powers are normalized to unit
/// total linear power on construction.
struct TapProfile {
  std::vector<Tap> taps;
  std::vector<double> power_linear;  // normalized
  double doppler_hz = 0.0;           // informational
  Fading fading = Fading::Static;

  TapProfile() = default;
  TapProfile(std::vector<Tap> taps_in, Fading fading_in,
             double doppler_hz_in = 0.0);
};

/// Eq.-(5)-style log-distance path loss with shadowing, dBm in / dBm out.
double received_power_db(double p_tx_dbm, const Vec2& tx_loc,
                         const Vec2& rx_loc, double gamma, double d0,
                         double shadow_db);

/// K i.i.d. zero-mean Gaussian shadowing values in dB.
std::vector<double> draw_shadowing(double sigma_q_db, std::size_t K, Rng& rng);

/// FIR convolution with a tap realization; delays snap to the sample grid;
/// output re-normalized to unit average power.
SampleBuffer apply_multipath(const SampleBuffer& sig, const TapProfile& profile,
                             Rng& rng);

/// r(n) = sqrt(p_tk)*s_t(n) + sqrt(p_ik)*s_i(n) + w(n); powers in dBm
/// (-inf disables a branch), noise variance in linear units.
SampleBuffer compose_received(const SampleBuffer& st, const SampleBuffer& si,
                              double p_tk_dbm, double p_ik_dbm,
                              double noise_var_linear, Rng& rng);

/// Circularly-symmetric complex Gaussian noise buffer with the given
/// variance (half per real/imag component).
SampleBuffer gen_noise(std::size_t n_samples, double fs,
                       double noise_var_linear, Rng& rng);

/// Deterministic composition from explicit component buffers (noise included
/// as a buffer); used where the same noise realization must be reused.
SampleBuffer compose_from_parts(const SampleBuffer& st, const SampleBuffer& si,
                                const SampleBuffer& w, double p_tk_dbm,
                                double p_ik_dbm);

}  // namespace cwcl
