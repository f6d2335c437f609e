#pragma once

#include <span>
#include <vector>

#include "cwcl/rng.hpp"
#include "cwcl/types.hpp"

namespace cwcl {

enum class SignalKind { SingleCarrier, Ofdm };
enum class PulseKind { Rectangular, RaisedCosine };

/// Parameters of a cyclostationary waveform. The cyclic frequency is the
/// symbol rate 1/symbol_period for both single-carrier and OFDM signals.
///
/// `duty` is the fraction of the symbol period covered by the rectangular
/// pulse (or OFDM window). A duty below 1 leaves a transmission gap each
/// symbol, which is what makes the mean of the lag-zero CAC nonzero for
/// constant-modulus constellations; with duty == 1 a 4-QAM signal has a
/// constant envelope and carries no symbol-rate feature in |s(n)|^2.
struct SignalSpec {
  SignalKind kind = SignalKind::SingleCarrier;
  int modulation_order = 4;
  double symbol_period = 0.0;       // T_g seconds
  double carrier_freq = 0.0;        // Hz
  int num_subcarriers = 0;          // OFDM only
  double subcarrier_spacing = 0.0;  // OFDM only, Hz
  double cp_duration = 0.0;         // OFDM only, seconds
  PulseKind pulse = PulseKind::Rectangular;
  double duty = 1.0;
  double rolloff = 0.35;  // raised cosine only

  double cyclic_frequency() const { return 1.0 / symbol_period; }

  static SignalSpec single_carrier(double symbol_rate, int order = 4,
                                   double duty = 1.0, double carrier = 0.0);
  static SignalSpec ofdm(int num_subcarriers, double subcarrier_spacing,
                         double cp_duration, int order = 4);

  /// Throws std::invalid_argument on inconsistent parameters.
  void validate() const;
};

/// Uniform draws from a unit-average-power QAM constellation.
/// Supported orders: 2, 4, 16, 64.
std::vector<cplx> gen_symbols(int order, std::size_t count, Rng& rng);

/// Constellation moments (unit average power): E[|a|^4] and E[a^2].
double qam_fourth_moment(int order);
cplx qam_second_moment(int order);

SampleBuffer gen_single_carrier(const SignalSpec& spec, std::size_t n_samples,
                                double fs, Rng& rng);
SampleBuffer gen_ofdm(const SignalSpec& spec, std::size_t n_samples, double fs,
                      Rng& rng);
/// Dispatch on spec.kind.
SampleBuffer gen_signal(const SignalSpec& spec, std::size_t n_samples,
                        double fs, Rng& rng);

/// Deterministic variants taking caller-supplied symbols; used by tests that
/// pin exact symbol values. `symbols[l]` is the symbol with index
/// `first_symbol_index + l`. For OFDM, `subcarrier_symbols[l]` holds the
/// N_c unscaled constellation points of that OFDM symbol.
SampleBuffer synth_single_carrier(const SignalSpec& spec, std::size_t n_samples,
                                  double fs, std::span<const cplx> symbols,
                                  long first_symbol_index);
SampleBuffer synth_ofdm(const SignalSpec& spec, std::size_t n_samples,
                        double fs,
                        std::span<const std::vector<cplx>> subcarrier_symbols,
                        long first_symbol_index);

}  // namespace cwcl
