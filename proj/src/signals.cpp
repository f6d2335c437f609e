#include "cwcl/signals.hpp"

#include <cmath>
#include <stdexcept>

namespace cwcl {

namespace {

std::vector<cplx> constellation(int order) {
  switch (order) {
    case 2:
      return {cplx(1.0, 0.0), cplx(-1.0, 0.0)};
    case 4:
    case 16:
    case 64: {
      const int side = order == 4 ? 2 : (order == 16 ? 4 : 8);
      std::vector<cplx> pts;
      pts.reserve(order);
      double energy = 0.0;
      for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) {
          const double re = 2.0 * i - (side - 1);
          const double im = 2.0 * j - (side - 1);
          pts.emplace_back(re, im);
          energy += re * re + im * im;
        }
      }
      const double scale = std::sqrt(static_cast<double>(order) / energy);
      for (auto& p : pts) p *= scale;
      return pts;
    }
    default:
      throw std::invalid_argument("unsupported QAM order " +
                                  std::to_string(order));
  }
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(M_PI * x) / (M_PI * x);
}

// Nyquist raised-cosine pulse, peak 1 at tau = 0.
double raised_cosine(double tau_over_T, double beta) {
  const double denom = 1.0 - std::pow(2.0 * beta * tau_over_T, 2);
  if (std::abs(denom) < 1e-9) {
    // limit at tau = T/(2*beta)
    return (M_PI / 4.0) * sinc(1.0 / (2.0 * beta));
  }
  return sinc(tau_over_T) * std::cos(M_PI * beta * tau_over_T) / denom;
}

}  // namespace

SignalSpec SignalSpec::single_carrier(double symbol_rate, int order,
                                      double duty, double carrier) {
  SignalSpec s;
  s.kind = SignalKind::SingleCarrier;
  s.modulation_order = order;
  s.symbol_period = 1.0 / symbol_rate;
  s.duty = duty;
  s.carrier_freq = carrier;
  return s;
}

SignalSpec SignalSpec::ofdm(int num_subcarriers, double subcarrier_spacing,
                            double cp_duration, int order) {
  SignalSpec s;
  s.kind = SignalKind::Ofdm;
  s.modulation_order = order;
  s.num_subcarriers = num_subcarriers;
  s.subcarrier_spacing = subcarrier_spacing;
  s.cp_duration = cp_duration;
  s.symbol_period = 1.0 / subcarrier_spacing + cp_duration;
  return s;
}

void SignalSpec::validate() const {
  if (symbol_period <= 0.0)
    throw std::invalid_argument("symbol_period must be positive");
  if (duty <= 0.0 || duty > 1.0)
    throw std::invalid_argument("duty must be in (0, 1]");
  if (kind == SignalKind::Ofdm) {
    if (num_subcarriers < 1)
      throw std::invalid_argument("num_subcarriers must be >= 1");
    if (cp_duration >= symbol_period)
      throw std::invalid_argument("cp_duration must be < symbol_period");
    const double tg = 1.0 / subcarrier_spacing + cp_duration;
    if (std::abs(tg - symbol_period) > 1e-9 * symbol_period)
      throw std::invalid_argument(
          "symbol_period must equal 1/subcarrier_spacing + cp_duration");
  }
  constellation(modulation_order);  // throws on bad order
}

std::vector<cplx> gen_symbols(int order, std::size_t count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("symbol count must be >= 1");
  const auto pts = constellation(order);
  std::vector<cplx> out(count);
  for (auto& s : out) s = pts[rng.integer(pts.size())];
  return out;
}

double qam_fourth_moment(int order) {
  const auto pts = constellation(order);
  double m4 = 0.0;
  for (const auto& p : pts) m4 += std::pow(std::norm(p), 2);
  return m4 / static_cast<double>(pts.size());
}

cplx qam_second_moment(int order) {
  const auto pts = constellation(order);
  cplx m2(0.0, 0.0);
  for (const auto& p : pts) m2 += p * p;
  return m2 / static_cast<double>(pts.size());
}

SampleBuffer synth_single_carrier(const SignalSpec& spec, std::size_t n_samples,
                                  double fs, std::span<const cplx> symbols,
                                  long first_symbol_index) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (fs <= 1.0 / spec.symbol_period)
    throw std::invalid_argument("fs must exceed the symbol rate");
  spec.validate();

  const double ts = 1.0 / fs;
  const double tg = spec.symbol_period;
  const long guard = spec.pulse == PulseKind::RaisedCosine ? 4 : 0;

  auto pulse_at = [&](double tau) -> double {
    if (spec.pulse == PulseKind::Rectangular) {
      return (tau >= 0.0 && tau < spec.duty * tg) ? 1.0 : 0.0;
    }
    return raised_cosine(tau / tg, spec.rolloff);
  };

  // Deterministic unit-power normalization from the pulse grid alone.
  double power = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) * ts;
    const long l0 = static_cast<long>(std::floor(t / tg));
    for (long l = l0 - guard; l <= l0 + guard; ++l) {
      const double g = pulse_at(t - static_cast<double>(l) * tg);
      power += g * g;
    }
  }
  power /= static_cast<double>(n_samples);
  if (power <= 0.0) throw std::invalid_argument("pulse grid has zero power");
  const double scale = 1.0 / std::sqrt(power);

  SampleBuffer buf;
  buf.sample_rate = fs;
  buf.samples.resize(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) * ts;
    const long l0 = static_cast<long>(std::floor(t / tg));
    cplx acc(0.0, 0.0);
    for (long l = l0 - guard; l <= l0 + guard; ++l) {
      const long idx = l - first_symbol_index;
      if (idx < 0 || idx >= static_cast<long>(symbols.size())) continue;
      const double g = pulse_at(t - static_cast<double>(l) * tg);
      if (g != 0.0) acc += symbols[idx] * g;
    }
    const double phase = 2.0 * M_PI * spec.carrier_freq * t;
    buf.samples[n] = scale * acc * std::polar(1.0, phase);
  }
  return buf;
}

SampleBuffer gen_single_carrier(const SignalSpec& spec, std::size_t n_samples,
                                double fs, Rng& rng) {
  if (spec.kind != SignalKind::SingleCarrier)
    throw std::invalid_argument("spec is not single-carrier");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const double tg = spec.symbol_period;
  const long guard = spec.pulse == PulseKind::RaisedCosine ? 4 : 0;
  const long l_min = -guard;
  const long l_max =
      static_cast<long>(std::floor((n_samples - 1) / (fs * tg))) + guard;
  const auto symbols = gen_symbols(spec.modulation_order,
                                   static_cast<std::size_t>(l_max - l_min + 1),
                                   rng);
  return synth_single_carrier(spec, n_samples, fs, symbols, l_min);
}

SampleBuffer synth_ofdm(const SignalSpec& spec, std::size_t n_samples,
                        double fs,
                        std::span<const std::vector<cplx>> subcarrier_symbols,
                        long first_symbol_index) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (fs <= 1.0 / spec.symbol_period)
    throw std::invalid_argument("fs must exceed the symbol rate");
  spec.validate();

  const double ts = 1.0 / fs;
  const double tg = spec.symbol_period;
  const int nc = spec.num_subcarriers;

  double power = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) * ts;
    const double tau = t - std::floor(t / tg) * tg;
    if (tau < spec.duty * tg) power += 1.0;
  }
  power /= static_cast<double>(n_samples);
  if (power <= 0.0) throw std::invalid_argument("window grid has zero power");
  const double scale = 1.0 / std::sqrt(power * static_cast<double>(nc));

  SampleBuffer buf;
  buf.sample_rate = fs;
  buf.samples.resize(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) * ts;
    const long l = static_cast<long>(std::floor(t / tg));
    const double tau = t - static_cast<double>(l) * tg;
    cplx acc(0.0, 0.0);
    const long idx = l - first_symbol_index;
    if (tau < spec.duty * tg && idx >= 0 &&
        idx < static_cast<long>(subcarrier_symbols.size())) {
      const auto& syms = subcarrier_symbols[idx];
      // kappa runs -Nc/2 .. Nc/2-1; the subcarrier phase uses absolute time
      // so the cyclic-prefix identity holds sample-exactly within a symbol.
      const cplx z = std::polar(1.0, 2.0 * M_PI * spec.subcarrier_spacing * t);
      cplx zk = std::polar(
          1.0, 2.0 * M_PI * spec.subcarrier_spacing * t * (-nc / 2.0));
      for (int k = 0; k < nc; ++k) {
        acc += syms[static_cast<std::size_t>(k)] * zk;
        zk *= z;
      }
    }
    const double phase = 2.0 * M_PI * spec.carrier_freq * t;
    buf.samples[n] = scale * acc * std::polar(1.0, phase);
  }
  return buf;
}

SampleBuffer gen_ofdm(const SignalSpec& spec, std::size_t n_samples, double fs,
                      Rng& rng) {
  if (spec.kind != SignalKind::Ofdm)
    throw std::invalid_argument("spec is not OFDM");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const double tg = spec.symbol_period;
  const long l_max = static_cast<long>(std::floor((n_samples - 1) / (fs * tg)));
  std::vector<std::vector<cplx>> syms;
  syms.reserve(static_cast<std::size_t>(l_max + 1));
  for (long l = 0; l <= l_max; ++l)
    syms.push_back(gen_symbols(spec.modulation_order,
                               static_cast<std::size_t>(spec.num_subcarriers),
                               rng));
  return synth_ofdm(spec, n_samples, fs, syms, 0);
}

SampleBuffer gen_signal(const SignalSpec& spec, std::size_t n_samples,
                        double fs, Rng& rng) {
  return spec.kind == SignalKind::SingleCarrier
             ? gen_single_carrier(spec, n_samples, fs, rng)
             : gen_ofdm(spec, n_samples, fs, rng);
}

}  // namespace cwcl
