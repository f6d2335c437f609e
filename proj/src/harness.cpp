#include "cwcl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <type_traits>

#include "cwcl/cyclo.hpp"
#include "cwcl/localize.hpp"
#include "cwcl/theory.hpp"

namespace cwcl {

namespace {

// RNG stream roles; every random draw in a trial comes from a stream
// derived as (base_seed, sweep index, trial, role) so trial scheduling
// order cannot change results.
constexpr std::uint64_t kRolePlacement = 1;
constexpr std::uint64_t kRoleShadow = 2;
constexpr std::uint64_t kRoleStBase = 10'000;
constexpr std::uint64_t kRoleSiBase = 40'000;
constexpr std::uint64_t kRoleFadeTBase = 3'000'000;
constexpr std::uint64_t kRoleFadeIBase = 3'500'000;
constexpr std::uint64_t kRoleNoiseBase = 4'000'000;

std::uint64_t noise_role(std::size_t k, int m) {
  return kRoleNoiseBase + static_cast<std::uint64_t>(k) * 100'000 +
         static_cast<std::uint64_t>(m);
}

struct SweepContext {
  SweepConfig cfg;            // resolved copy for this sweep value
  std::size_t sweep_idx = 0;
  double sweep_value = 0.0;
  int m_eff = 1;              // realizations simulated per trial
  bool want[3] = {false, false, false};  // wcl, cyclic, improved
  std::optional<TapProfile> taps;
  bool rayleigh = false;
  std::optional<theory::ThetaStats> stats;
  // phi0 cache for Optimal mode when powers are trial-invariant
  std::optional<double> phi0_opt_cached;
};

struct TrialOutcome {
  double sq[3] = {0.0, 0.0, 0.0};
  double phi0 = 0.0;
  bool has_phi0 = false;
};

int algo_index(Algorithm a) {
  switch (a) {
    case Algorithm::Wcl: return 0;
    case Algorithm::CyclicWcl: return 1;
    case Algorithm::ImprovedCyclicWcl: return 2;
  }
  throw std::logic_error("unknown algorithm");
}

SignalSpec retuned_single_carrier(const SignalSpec& spec, double rate) {
  if (spec.kind != SignalKind::SingleCarrier)
    throw std::invalid_argument(
        "cyclic-frequency sweep supports single-carrier interferers only");
  SignalSpec out = spec;
  out.symbol_period = 1.0 / rate;
  return out;
}

TrialOutcome run_trial(const SweepContext& ctx, int trial) {
  const auto& cfg = ctx.cfg;
  const auto& sc = cfg.scenario;
  const double alpha = cfg.signal_t.cyclic_frequency();
  const std::size_t n = cfg.n_samples;
  const double sigma_w2 = sc.noise_var_mw();
  const auto si_ = static_cast<std::uint64_t>(ctx.sweep_idx);
  const auto tr = static_cast<std::uint64_t>(trial);

  // Geometry and received powers for this trial.
  std::vector<Vec2> locs;
  if (cfg.placement == Placement::FixedGrid) {
    locs = fixed_grid_placement();
  } else {
    Rng rng = Rng::derive(cfg.base_seed, si_, tr, kRolePlacement);
    locs = uniform_cr_placement(cfg.K, sc.side_a, rng);
  }
  const std::size_t K = locs.size();

  Rng shadow_rng = Rng::derive(cfg.base_seed, si_, tr, kRoleShadow);
  const auto q_t = draw_shadowing(sc.sigma_q_db, K, shadow_rng);
  const auto q_i = draw_shadowing(sc.sigma_q_db, K, shadow_rng);

  std::vector<double> p_t_dbm(K), p_i_dbm(K), p_t_lin(K), p_i_lin(K);
  for (std::size_t k = 0; k < K; ++k) {
    p_t_dbm[k] = received_power_db(sc.p_t_dbm, sc.target_loc, locs[k],
                                   sc.gamma, sc.d0, q_t[k]);
    p_i_dbm[k] = received_power_db(sc.p_i_dbm, sc.interferer_loc, locs[k],
                                   sc.gamma, sc.d0, q_i[k]);
    p_t_lin[k] = dbm_to_mw(p_t_dbm[k]);
    p_i_lin[k] = dbm_to_mw(p_i_dbm[k]);
  }

  // Component CACs per realization. Without multipath the transmitted
  // components are shared by all CRs; with multipath each CR sees its own
  // filtered copy.
  const int m_eff = ctx.m_eff;
  const bool need_alpha0 = ctx.want[0];
  std::vector<std::vector<cplx>> r_hat(K);  // r_hat[k][m]
  for (auto& v : r_hat) v.resize(static_cast<std::size_t>(m_eff));
  std::vector<double> wcl_weights(K, 0.0);

  for (int m = 0; m < m_eff; ++m) {
    Rng st_rng = Rng::derive(cfg.base_seed, si_, tr,
                             kRoleStBase + static_cast<std::uint64_t>(m));
    Rng si_rng = Rng::derive(cfg.base_seed, si_, tr,
                             kRoleSiBase + static_cast<std::uint64_t>(m));
    const auto st = gen_signal(cfg.signal_t, n, sc.fs, st_rng);
    const auto sig_i = gen_signal(cfg.signal_i, n, sc.fs, si_rng);
    const bool last = m == m_eff - 1;

    cplx r_st, r_si, r_stsi, r0_st, r0_si, r0_stsi;
    if (!ctx.taps) {
      r_st = cac(st, alpha).value;
      r_si = cac(sig_i, alpha).value;
      r_stsi = ccc(st, sig_i, alpha).value;
      if (need_alpha0 && last) {
        r0_st = cac(st, 0.0).value;
        r0_si = cac(sig_i, 0.0).value;
        r0_stsi = ccc(st, sig_i, 0.0).value;
      }
    }

    for (std::size_t k = 0; k < K; ++k) {
      SampleBuffer st_k, si_k;
      const SampleBuffer* pst = &st;
      const SampleBuffer* psi = &sig_i;
      if (ctx.taps) {
        // Block fading: the tap realization is a function of (trial, CR,
        // link) only, so re-deriving the stream per m reproduces it.
        Rng ft = Rng::derive(cfg.base_seed, si_, tr,
                             kRoleFadeTBase + static_cast<std::uint64_t>(k));
        Rng fi = Rng::derive(cfg.base_seed, si_, tr,
                             kRoleFadeIBase + static_cast<std::uint64_t>(k));
        st_k = apply_multipath(st, *ctx.taps, ft);
        si_k = apply_multipath(sig_i, *ctx.taps, fi);
        pst = &st_k;
        psi = &si_k;
        r_st = cac(*pst, alpha).value;
        r_si = cac(*psi, alpha).value;
        r_stsi = ccc(*pst, *psi, alpha).value;
        if (need_alpha0 && last) {
          r0_st = cac(*pst, 0.0).value;
          r0_si = cac(*psi, 0.0).value;
          r0_stsi = ccc(*pst, *psi, 0.0).value;
        }
      }
      Rng nrng = Rng::derive(cfg.base_seed, si_, tr, noise_role(k, m));
      const auto w = gen_noise(n, sc.fs, sigma_w2, nrng);
      const cplx r_w = cac(w, alpha).value;
      const cplx r_stw = ccc(*pst, w, alpha).value;
      const cplx r_siw = ccc(*psi, w, alpha).value;
      const double pt = p_t_lin[k], pi = p_i_lin[k];
      r_hat[k][static_cast<std::size_t>(m)] =
          pt * r_st + pi * r_si + std::sqrt(pt * pi) * r_stsi + r_w +
          std::sqrt(pt) * r_stw + std::sqrt(pi) * r_siw;
      if (need_alpha0 && last) {
        const cplx r0_w = cac(w, 0.0).value;
        const cplx r0_stw = ccc(*pst, w, 0.0).value;
        const cplx r0_siw = ccc(*psi, w, 0.0).value;
        const cplx r0 = pt * r0_st + pi * r0_si +
                        std::sqrt(pt * pi) * r0_stsi + r0_w +
                        std::sqrt(pt) * r0_stw + std::sqrt(pi) * r0_siw;
        wcl_weights[k] = std::norm(r0);
      }
    }
  }

  std::vector<double> strengths(K);
  for (std::size_t k = 0; k < K; ++k)
    strengths[k] = std::norm(r_hat[k].back());

  TrialOutcome out;
  auto record = [&](int idx, const LocationEstimate& est) {
    const double dx = est.x - sc.target_loc.x;
    const double dy = est.y - sc.target_loc.y;
    out.sq[idx] = dx * dx + dy * dy;
  };

  if (ctx.want[0]) record(0, cyclic_wcl(locs, wcl_weights));
  if (ctx.want[1]) record(1, cyclic_wcl(locs, strengths));
  if (ctx.want[2]) {
    std::vector<double> fvc(K);
    std::vector<CacEstimate> reals(static_cast<std::size_t>(m_eff));
    for (std::size_t k = 0; k < K; ++k) {
      for (int m = 0; m < m_eff; ++m)
        reals[static_cast<std::size_t>(m)] = {
            r_hat[k][static_cast<std::size_t>(m)], alpha, n};
      fvc[k] = fvc_sample(reals).phi_hat;
    }
    double phi0;
    switch (cfg.phi0_mode) {
      case Phi0Mode::Suboptimal:
        phi0 = suboptimal_threshold(locs, strengths, fvc).phi0;
        break;
      case Phi0Mode::Optimal:
        if (ctx.phi0_opt_cached) {
          phi0 = *ctx.phi0_opt_cached;
        } else {
          if (!ctx.stats)
            throw std::invalid_argument(
                "optimal phi0 requires the analytic moment path");
          phi0 = theory::optimal_threshold(locs, p_t_lin, p_i_lin, *ctx.stats)
                     .phi0_opt;
        }
        break;
      case Phi0Mode::Fixed:
        phi0 = cfg.phi0_fixed;
        break;
      default:
        throw std::logic_error("unknown phi0 mode");
    }
    LocationEstimate est;
    try {
      est = improved_cyclic_wcl(locs, strengths, fvc, phi0);
    } catch (const std::domain_error&) {
      // Fixed threshold below every phi_hat: fall back to the minimum.
      phi0 = *std::min_element(fvc.begin(), fvc.end());
      est = improved_cyclic_wcl(locs, strengths, fvc, phi0);
    }
    record(2, est);
    out.phi0 = phi0;
    out.has_phi0 = true;
  }
  return out;
}

SweepContext make_context(const SweepConfig& base, std::size_t sweep_idx,
                          double value) {
  SweepContext ctx;
  ctx.cfg = base;
  ctx.sweep_idx = sweep_idx;
  ctx.sweep_value = value;
  auto& cfg = ctx.cfg;
  switch (cfg.sweep_var) {
    case SweepVar::TransmitPowerRatioDb:
      cfg.scenario.p_i_dbm = cfg.scenario.p_t_dbm - value;
      break;
    case SweepVar::InterfererLocation:
      cfg.scenario.interferer_loc = {value, value};
      break;
    case SweepVar::CrCount:
      if (cfg.placement == Placement::FixedGrid)
        throw std::invalid_argument(
            "CR-count sweep requires uniform placement");
      cfg.K = static_cast<std::size_t>(std::llround(value));
      if (cfg.K < 1) throw std::invalid_argument("K must be >= 1");
      break;
    case SweepVar::SampleCountN:
      cfg.n_samples = static_cast<std::size_t>(std::llround(value));
      if (cfg.n_samples < 1) throw std::invalid_argument("N must be >= 1");
      break;
    case SweepVar::DeltaAlpha:
      cfg.signal_i = retuned_single_carrier(
          cfg.signal_i, cfg.signal_t.cyclic_frequency() + value);
      break;
    case SweepVar::ShadowSigmaDb:
      if (value < 0.0) throw std::invalid_argument("sigma_q must be >= 0");
      cfg.scenario.sigma_q_db = value;
      break;
    case SweepVar::ChannelModel: {
      const int model = static_cast<int>(std::llround(value));
      if (model < 0 || model > 2)
        throw std::invalid_argument("channel model must be 0, 1, or 2");
      if (model > 0) {
        const double tap_delay = 2.0 / cfg.scenario.fs;
        ctx.rayleigh = model == 2;
        ctx.taps.emplace(
            std::vector<Tap>{{0.0, 0.0}, {tap_delay, -3.0}},
            ctx.rayleigh ? Fading::RayleighPerTrial : Fading::Static);
      }
      break;
    }
  }

  for (const auto a : cfg.algorithms) ctx.want[algo_index(a)] = true;

  // Analytic moments, when the configuration admits them.
  try {
    ctx.stats = theory::theta_moments(cfg.signal_t, cfg.signal_i,
                                      cfg.n_samples, cfg.scenario.fs,
                                      cfg.scenario.noise_var_mw());
  } catch (const std::invalid_argument&) {
    ctx.stats.reset();
  }

  int m = cfg.M;
  if (m == 0 && ctx.want[2]) {
    // Automatic M: confidence-interval sizing from the analytic moments of
    // a representative (median-rho) CR; falls back to 60.
    m = 60;
    if (ctx.stats) {
      try {
        std::vector<Vec2> locs;
        if (cfg.placement == Placement::FixedGrid) {
          locs = fixed_grid_placement();
        } else {
          Rng rng = Rng::derive(cfg.base_seed, sweep_idx, 0, kRolePlacement);
          locs = uniform_cr_placement(cfg.K, cfg.scenario.side_a, rng);
        }
        std::vector<double> rho, phis;
        std::vector<std::pair<double, double>> pw;
        for (const auto& loc : locs) {
          const double pt = dbm_to_mw(
              received_power_db(cfg.scenario.p_t_dbm, cfg.scenario.target_loc,
                                loc, cfg.scenario.gamma, cfg.scenario.d0, 0.0));
          const double pi = dbm_to_mw(received_power_db(
              cfg.scenario.p_i_dbm, cfg.scenario.interferer_loc, loc,
              cfg.scenario.gamma, cfg.scenario.d0, 0.0));
          rho.push_back(pt / pi);
          phis.push_back(theory::fvc_theoretical(pt / pi, *ctx.stats));
          pw.emplace_back(pt, pi);
        }
        std::sort(phis.begin(), phis.end());
        double delta = 1.0;
        for (std::size_t i = 1; i < phis.size(); ++i)
          delta = std::min(delta, phis[i] - phis[i - 1]);
        std::vector<double> sorted_rho = rho;
        std::sort(sorted_rho.begin(), sorted_rho.end());
        const double med = sorted_rho[sorted_rho.size() / 2];
        const auto it =
            std::find(rho.begin(), rho.end(), med) - rho.begin();
        const auto mom = theory::cac_quadform_moments(
            theory::build_power_vector(pw[static_cast<std::size_t>(it)].first,
                                       pw[static_cast<std::size_t>(it)].second),
            *ctx.stats);
        m = select_M(mom.var_r, mom.e_r2, mom.var_r2, cfg.beta, delta);
      } catch (const std::exception&) {
        m = 60;
      }
    }
  }
  if (m == 0) m = 1;
  ctx.m_eff = ctx.want[2] ? m : 1;
  ctx.cfg.M = m;

  // Cache the optimal threshold when it cannot vary across trials.
  if (ctx.want[2] && cfg.phi0_mode == Phi0Mode::Optimal && ctx.stats &&
      cfg.placement == Placement::FixedGrid &&
      cfg.scenario.sigma_q_db == 0.0) {
    std::vector<Vec2> locs = fixed_grid_placement();
    std::vector<double> pt_lin, pi_lin;
    for (const auto& loc : locs) {
      pt_lin.push_back(dbm_to_mw(
          received_power_db(cfg.scenario.p_t_dbm, cfg.scenario.target_loc,
                            loc, cfg.scenario.gamma, cfg.scenario.d0, 0.0)));
      pi_lin.push_back(dbm_to_mw(received_power_db(
          cfg.scenario.p_i_dbm, cfg.scenario.interferer_loc, loc,
          cfg.scenario.gamma, cfg.scenario.d0, 0.0)));
    }
    ctx.phi0_opt_cached =
        theory::optimal_threshold(locs, pt_lin, pi_lin, *ctx.stats).phi0_opt;
  }
  return ctx;
}

void append_theory_rows(const SweepContext& ctx, SweepResult& result) {
  const auto& cfg = ctx.cfg;
  if (!ctx.stats) return;
  if (cfg.scenario.target_loc.x != 0.0 || cfg.scenario.target_loc.y != 0.0)
    throw std::invalid_argument(
        "theoretical RMSE requires the target at the origin");
  std::vector<Vec2> locs;
  if (cfg.placement == Placement::FixedGrid) {
    locs = fixed_grid_placement();
  } else {
    Rng rng = Rng::derive(cfg.base_seed, ctx.sweep_idx, 0, kRolePlacement);
    locs = uniform_cr_placement(cfg.K, cfg.scenario.side_a, rng);
  }
  std::vector<double> pt_lin, pi_lin;
  for (const auto& loc : locs) {
    pt_lin.push_back(dbm_to_mw(
        received_power_db(cfg.scenario.p_t_dbm, cfg.scenario.target_loc, loc,
                          cfg.scenario.gamma, cfg.scenario.d0, 0.0)));
    pi_lin.push_back(dbm_to_mw(
        received_power_db(cfg.scenario.p_i_dbm, cfg.scenario.interferer_loc,
                          loc, cfg.scenario.gamma, cfg.scenario.d0, 0.0)));
  }
  if (ctx.want[1]) {
    const auto q = theory::build_quadforms(pt_lin, pi_lin, locs);
    SweepRow row;
    row.sweep_value = ctx.sweep_value;
    row.algorithm = "cyclic_theory";
    row.rmse_m = theory::rmse_theoretical(q, *ctx.stats);
    row.trials = 0;
    row.seed = cfg.base_seed;
    result.rows.push_back(std::move(row));
  }
  if (ctx.want[2]) {
    const auto opt =
        theory::optimal_threshold(locs, pt_lin, pi_lin, *ctx.stats);
    SweepRow row;
    row.sweep_value = ctx.sweep_value;
    row.algorithm = "improved_theory";
    row.rmse_m = opt.eps_opt;
    row.trials = 0;
    row.mean_phi0 = opt.phi0_opt;
    row.seed = cfg.base_seed;
    result.rows.push_back(std::move(row));
  }
}

}  // namespace

void SweepConfig::validate() const {
  scenario.validate();
  signal_t.validate();
  signal_i.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (sweep_values.empty())
    throw std::invalid_argument("sweep_values must be non-empty");
  if (algorithms.empty())
    throw std::invalid_argument("select at least one algorithm");
  if (M < 0) throw std::invalid_argument("M must be >= 0");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (beta <= 0.0 || beta >= 1.0)
    throw std::invalid_argument("beta must be in (0,1)");
}

std::vector<Vec2> uniform_cr_placement(std::size_t K, double side_a,
                                       Rng& rng) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (side_a <= 0.0) throw std::invalid_argument("side_a must be positive");
  std::vector<Vec2> locs(K);
  for (auto& l : locs) {
    l.x = rng.uniform(-side_a / 2.0, side_a / 2.0);
    l.y = rng.uniform(-side_a / 2.0, side_a / 2.0);
  }
  return locs;
}

std::vector<Vec2> fixed_grid_placement() {
  std::vector<Vec2> locs;
  locs.reserve(50);
  for (int xi = 0; xi < 5; ++xi)
    for (int yi = 0; yi < 10; ++yi)
      locs.push_back({-40.0 + 20.0 * xi, -45.0 + 10.0 * yi});
  return locs;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult result;
  for (std::size_t si_ = 0; si_ < cfg.sweep_values.size(); ++si_) {
    const SweepContext ctx = make_context(cfg, si_, cfg.sweep_values[si_]);

    std::vector<TrialOutcome> outcomes(
        static_cast<std::size_t>(ctx.cfg.trials));
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::string error;
    const unsigned workers = std::max(
        1u, std::min(std::thread::hardware_concurrency(),
                     static_cast<unsigned>(ctx.cfg.trials)));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const int t = next.fetch_add(1);
          if (t >= ctx.cfg.trials) return;
          try {
            outcomes[static_cast<std::size_t>(t)] = run_trial(ctx, t);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (error.empty())
              error = "trial " + std::to_string(t) + " (sweep value " +
                      std::to_string(ctx.sweep_value) + "): " + e.what();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (!error.empty()) throw std::runtime_error(error);

    static const Algorithm kOrder[3] = {Algorithm::Wcl, Algorithm::CyclicWcl,
                                        Algorithm::ImprovedCyclicWcl};
    static const char* kNames[3] = {"wcl", "cyclic", "improved"};
    for (int a = 0; a < 3; ++a) {
      if (!ctx.want[algo_index(kOrder[a])]) continue;
      double acc = 0.0;
      double phi_acc = 0.0;
      int phi_n = 0;
      for (const auto& o : outcomes) {
        acc += o.sq[a];
        if (a == 2 && o.has_phi0) {
          phi_acc += o.phi0;
          ++phi_n;
        }
      }
      SweepRow row;
      row.sweep_value = ctx.sweep_value;
      row.algorithm = kNames[a];
      row.rmse_m = std::sqrt(acc / static_cast<double>(ctx.cfg.trials));
      row.trials = ctx.cfg.trials;
      if (phi_n > 0) row.mean_phi0 = phi_acc / phi_n;
      row.seed = cfg.base_seed;
      result.rows.push_back(std::move(row));
    }
    if (cfg.with_theory) append_theory_rows(ctx, result);
  }
  return result;
}

long long ops_count(Algorithm alg, long long K, long long N, long long M,
                    long long eta) {
  if (K < 1 || N < 1 || M < 1 || eta < 0)
    throw std::invalid_argument("ops_count arguments must be positive");
  switch (alg) {
    case Algorithm::Wcl:
      return 11 * K * N + 23 * K + 26;
    case Algorithm::CyclicWcl:
      return 21 * K * N + 23 * K + 36;
    case Algorithm::ImprovedCyclicWcl:
      return 21 * M * K * N + 24 * M * K + 19 * M + (71 + eta) * K + 17;
  }
  throw std::logic_error("unknown algorithm");
}

std::string algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::Wcl: return "wcl";
    case Algorithm::CyclicWcl: return "cyclic";
    case Algorithm::ImprovedCyclicWcl: return "improved";
  }
  throw std::logic_error("unknown algorithm");
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string csv_string(const SweepResult& result) {
  std::string out = "sweep_value,algorithm,rmse_m,trials,mean_phi0,seed\n";
  for (const auto& r : result.rows) {
    out += fmt_double(r.sweep_value);
    out += ',';
    out += r.algorithm;
    out += ',';
    out += fmt_double(r.rmse_m);
    out += ',';
    out += std::to_string(r.trials);
    out += ',';
    if (r.mean_phi0) out += fmt_double(*r.mean_phi0);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << csv_string(result);
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace {

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    kv[key] = val;
  }
  return kv;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '\t') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

SweepConfig parse_config_text(const std::string& text) {
  auto kv = parse_kv(text);
  SweepConfig cfg;

  // Signal defaults: 4-QAM single carrier, half-duty rectangular pulse.
  double alpha_t = 20e6, alpha_i = 25e6;
  double duty_t = 0.5, duty_i = 0.5;
  int order_t = 4, order_i = 4;
  double carrier_t = 0.0, carrier_i = 0.0;
  std::string kind_t = "sc", kind_i = "sc";
  int nc_t = 64, nc_i = 64;
  double spacing_t = 312.5e3, spacing_i = 312.5e3;
  double cp_t = 0.8e-6, cp_i = 0.8e-6;

  auto take = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto num = [&](const char* key, double& dst) {
    if (const auto v = take(key)) {
      std::size_t pos = 0;
      dst = std::stod(*v, &pos);
      if (pos != v->size())
        throw std::invalid_argument(std::string("bad number for ") + key);
    }
  };
  auto integer = [&](const char* key, auto& dst) {
    double d = static_cast<double>(dst);
    num(key, d);
    dst = static_cast<std::remove_reference_t<decltype(dst)>>(
        std::llround(d));
  };
  auto word = [&](const char* key, std::string& dst) {
    if (const auto v = take(key)) dst = *v;
  };

  num("p_t_dbm", cfg.scenario.p_t_dbm);
  num("p_i_dbm", cfg.scenario.p_i_dbm);
  num("gamma", cfg.scenario.gamma);
  num("d0", cfg.scenario.d0);
  num("sigma_q_db", cfg.scenario.sigma_q_db);
  num("noise_psd_dbm_hz", cfg.scenario.noise_psd_dbm_hz);
  num("fs", cfg.scenario.fs);
  num("side_a", cfg.scenario.side_a);
  num("interferer_x", cfg.scenario.interferer_loc.x);
  num("interferer_y", cfg.scenario.interferer_loc.y);

  integer("trials", cfg.trials);
  integer("seed", cfg.base_seed);
  integer("m", cfg.M);
  integer("n", cfg.n_samples);
  integer("k", cfg.K);
  num("eta", cfg.eta);
  num("beta", cfg.beta);
  num("phi0", cfg.phi0_fixed);

  num("alpha_t", alpha_t);
  num("alpha_i", alpha_i);
  num("duty_t", duty_t);
  num("duty_i", duty_i);
  integer("order_t", order_t);
  integer("order_i", order_i);
  num("carrier_t", carrier_t);
  num("carrier_i", carrier_i);
  word("signal_t", kind_t);
  word("signal_i", kind_i);
  integer("nc_t", nc_t);
  integer("nc_i", nc_i);
  num("spacing_t", spacing_t);
  num("spacing_i", spacing_i);
  num("cp_t", cp_t);
  num("cp_i", cp_i);

  std::string s;
  s.clear();
  word("placement", s);
  if (!s.empty()) {
    if (s == "grid")
      cfg.placement = Placement::FixedGrid;
    else if (s == "uniform")
      cfg.placement = Placement::UniformRandom;
    else
      throw std::invalid_argument("placement must be grid or uniform");
  }

  s.clear();
  word("phi0_mode", s);
  if (!s.empty()) {
    if (s == "suboptimal")
      cfg.phi0_mode = Phi0Mode::Suboptimal;
    else if (s == "optimal")
      cfg.phi0_mode = Phi0Mode::Optimal;
    else if (s == "fixed")
      cfg.phi0_mode = Phi0Mode::Fixed;
    else
      throw std::invalid_argument(
          "phi0_mode must be suboptimal, optimal, or fixed");
  }

  s.clear();
  word("sweep_var", s);
  if (!s.empty()) {
    if (s == "rho_db")
      cfg.sweep_var = SweepVar::TransmitPowerRatioDb;
    else if (s == "interferer_pos")
      cfg.sweep_var = SweepVar::InterfererLocation;
    else if (s == "cr_count")
      cfg.sweep_var = SweepVar::CrCount;
    else if (s == "n_samples")
      cfg.sweep_var = SweepVar::SampleCountN;
    else if (s == "delta_alpha")
      cfg.sweep_var = SweepVar::DeltaAlpha;
    else if (s == "shadow_sigma_db")
      cfg.sweep_var = SweepVar::ShadowSigmaDb;
    else if (s == "channel_model")
      cfg.sweep_var = SweepVar::ChannelModel;
    else
      throw std::invalid_argument("unknown sweep_var: " + s);
  }

  if (const auto v = take("sweep_values")) {
    for (const auto& tok : split_list(*v))
      cfg.sweep_values.push_back(std::stod(tok));
  }

  if (const auto v = take("algorithms")) {
    for (const auto& tok : split_list(*v)) {
      if (tok == "wcl")
        cfg.algorithms.push_back(Algorithm::Wcl);
      else if (tok == "cyclic")
        cfg.algorithms.push_back(Algorithm::CyclicWcl);
      else if (tok == "improved")
        cfg.algorithms.push_back(Algorithm::ImprovedCyclicWcl);
      else
        throw std::invalid_argument("unknown algorithm: " + tok);
    }
  } else {
    cfg.algorithms = {Algorithm::Wcl, Algorithm::CyclicWcl,
                      Algorithm::ImprovedCyclicWcl};
  }

  if (!kv.empty())
    throw std::invalid_argument("unknown config key: " + kv.begin()->first);

  auto make_spec = [&](const std::string& kind, double alpha, double duty,
                       int order, double carrier, int nc, double spacing,
                       double cp) {
    SignalSpec spec;
    if (kind == "sc") {
      spec = SignalSpec::single_carrier(alpha, order, duty, carrier);
    } else if (kind == "ofdm") {
      spec = SignalSpec::ofdm(nc, spacing, cp, order);
      spec.duty = duty;
      spec.carrier_freq = carrier;
    } else {
      throw std::invalid_argument("signal kind must be sc or ofdm");
    }
    return spec;
  };
  cfg.signal_t = make_spec(kind_t, alpha_t, duty_t, order_t, carrier_t, nc_t,
                           spacing_t, cp_t);
  cfg.signal_i = make_spec(kind_i, alpha_i, duty_i, order_i, carrier_i, nc_i,
                           spacing_i, cp_i);

  // The fixed benchmark grid implies K = 50.
  if (cfg.placement == Placement::FixedGrid) cfg.K = 50;
  cfg.scenario.cr_locs = cfg.placement == Placement::FixedGrid
                             ? fixed_grid_placement()
                             : std::vector<Vec2>{{0.1, 0.1}};
  cfg.validate();
  return cfg;
}

SweepConfig parse_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace cwcl
