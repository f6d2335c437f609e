#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cwcl/signals.hpp"
#include "cwcl/types.hpp"

namespace cwcl::theory {

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Vec12 = Eigen::Vector<double, 12>;
using Vec6 = Eigen::Vector<double, 6>;

/// First and second moments of the 12-dim Gaussian model of the component
/// CAC/CCC vector theta = [Re of {R_st, R_si, R_stsi, R_w, R_stw, R_siw};
/// Im of the same]. The covariance is block-diagonal across the six
/// components (all cross-covariances vanish), 2x2 Re/Im blocks each.
struct ThetaStats {
  Vec12 mean = Vec12::Zero();
  Mat12 cov = Mat12::Zero();
  std::size_t N = 0;
};

/// Matrices of the ratio-of-quadratic-forms representation of the weighted
/// centroid: x_hat = theta' A_x theta / theta' B theta.
struct QuadFormSet {
  Mat12 A_x = Mat12::Zero();
  Mat12 A_y = Mat12::Zero();
  Mat12 B = Mat12::Zero();
  Eigen::MatrixXd P;       // 6 x K, column k = p_k
  Eigen::VectorXd x, y;    // CR coordinates (diagonals of X, Y)
  std::vector<int> s0;     // 0/1 selection per CR
};

/// p_k = [p_tk, p_ik, sqrt(p_tk p_ik), 1, sqrt(p_tk), sqrt(p_ik)]'
Vec6 build_power_vector(double p_tk, double p_ik);

/// Assemble P, X, Y and the quadratic forms for the given selection
/// (s0 empty means all CRs selected).
QuadFormSet build_quadforms(std::span<const double> p_t_lin,
                            std::span<const double> p_i_lin,
                            std::span<const Vec2> cr_locs,
                            std::span<const int> s0 = {});

/// Analytic mean/covariance of theta for rectangular-pulse single-carrier
/// or OFDM components observed over N samples at the target's cyclic
/// frequency spec_t.cyclic_frequency(). Raised-cosine pulses have no
/// analytic path and throw.
ThetaStats theta_moments(const SignalSpec& spec_t, const SignalSpec& spec_i,
                         std::size_t N, double fs, double sigma_w2);

struct QuadDiagnostics {
  double jitter = 0.0;       // added to cov diagonal, if any
  int panels = 0;            // quadrature panels used
  double err_estimate = 0.0; // last panel refinement delta
};

/// E[(theta'A theta / theta'B theta)^2] for Gaussian theta, via the
/// two-integral closed form (Cholesky + eigendecomposition + adaptive
/// Gauss-Legendre quadrature on t = u/(1-u)).
double rqgv_second_moment(const Mat12& A, const Mat12& B,
                          const ThetaStats& stats,
                          QuadDiagnostics* diag = nullptr);

/// sqrt(E[x_hat^2] + E[y_hat^2]) — an RMSE only when the target sits at
/// the origin of the coordinate frame.
double rmse_theoretical(const QuadFormSet& q, const ThetaStats& stats,
                        QuadDiagnostics* diag = nullptr);

/// Theoretical FVC at received power ratio rho_k = p_tk/p_ik (linear);
/// noise terms dropped.
double fvc_theoretical(double rho_k, const ThetaStats& stats);

struct ThresholdResult {
  double phi0_opt = 0.0;
  double eps_opt = 0.0;
  std::vector<double> candidates;  // sorted theoretical FVC values
  std::vector<double> eps;         // RMSE at each candidate threshold
};

/// Evaluate the theoretical RMSE at each of the K candidate thresholds
/// (the sorted per-CR theoretical FVCs) and return the minimizer; ties
/// break toward the smallest threshold.
ThresholdResult optimal_threshold(std::span<const Vec2> cr_locs,
                                  std::span<const double> p_t_lin,
                                  std::span<const double> p_i_lin,
                                  const ThetaStats& stats);

struct CacMoments {
  cplx mean;          // E[R_hat]
  double var_r = 0.0; // var(R_hat), total (real+imag)
  double e_r2 = 0.0;  // E[|R_hat|^2]
  double var_r2 = 0.0;// var(|R_hat|^2)
};

/// Moments of a single CR's received-signal CAC from the Gaussian model,
/// with A_k = diag(p_k p_k', p_k p_k').
CacMoments cac_quadform_moments(const Vec6& p_k, const ThetaStats& stats);

/// Normalized sidelobe power of the interferer's spectral line leaking
/// into alpha_t: the squared Dirichlet factor at delta_alpha.
double interference_leakage(const SignalSpec& spec_i, std::size_t N,
                            double fs, double alpha_t);

}  // namespace cwcl::theory
