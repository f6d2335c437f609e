#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwcl/channel.hpp"
#include "cwcl/signals.hpp"

namespace cwcl {

enum class SweepVar {
  TransmitPowerRatioDb,  // rho = p_t/p_i in dB; p_i derived from p_t
  InterfererLocation,    // interferer at (v, v)
  CrCount,
  SampleCountN,
  DeltaAlpha,            // true alpha_i = alpha_t + v, N left as configured
  ShadowSigmaDb,
  ChannelModel,          // 0 none, 1 static 2-tap, 2 Rayleigh 2-tap
};

enum class Placement { FixedGrid, UniformRandom };
enum class Phi0Mode { Suboptimal, Optimal, Fixed };
enum class Algorithm { Wcl, CyclicWcl, ImprovedCyclicWcl };

struct SweepConfig {
  NetworkScenario scenario;
  SignalSpec signal_t;
  SignalSpec signal_i;
  SweepVar sweep_var = SweepVar::TransmitPowerRatioDb;
  std::vector<double> sweep_values;
  std::vector<Algorithm> algorithms;
  int trials = 200;
  Placement placement = Placement::FixedGrid;
  std::uint64_t base_seed = 1;
  int M = 60;            // 0 = choose automatically per sweep value
  Phi0Mode phi0_mode = Phi0Mode::Suboptimal;
  double phi0_fixed = 0.2;
  std::size_t n_samples = 500;
  std::size_t K = 50;    // CR count for random placement
  double eta = 10.0;     // per-point k-means OPS factor
  double beta = 0.9;     // confidence level for automatic M
  bool with_theory = false;

  void validate() const;  // throws std::invalid_argument
};

struct SweepRow {
  double sweep_value = 0.0;
  std::string algorithm;
  double rmse_m = 0.0;
  int trials = 0;
  std::optional<double> mean_phi0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Parse a line-oriented `key = value` scenario file ('#' comments).
SweepConfig parse_config(const std::string& path);
SweepConfig parse_config_text(const std::string& text);

/// K i.i.d. uniform CR positions in the side_a square centered at origin.
std::vector<Vec2> uniform_cr_placement(std::size_t K, double side_a, Rng& rng);

/// The fixed 5x10 benchmark grid: x in {-40,-20,0,20,40} crossed with
/// y in {-45,...,45} (step 10), 50 CRs.
std::vector<Vec2> fixed_grid_placement();

/// Execute the Monte Carlo sweep. Deterministic in (cfg, base_seed); trials
/// run concurrently on isolated RNG streams.
SweepResult run_sweep(const SweepConfig& cfg);

/// Operation-count models for the three algorithms.
long long ops_count(Algorithm alg, long long K, long long N, long long M = 1,
                    long long eta = 10);

void emit_csv(const SweepResult& result, const std::string& path);
std::string csv_string(const SweepResult& result);

std::string algorithm_name(Algorithm alg);

}  // namespace cwcl
