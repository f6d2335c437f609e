#pragma once

#include <span>
#include <vector>

#include "cwcl/types.hpp"

namespace cwcl {

/// Weighted-centroid output plus the CR subset that produced it.
struct LocationEstimate {
  double x = 0.0;
  double y = 0.0;
  std::vector<std::size_t> included_crs;
  double phi0_used = -1.0;  // < 0 means "no threshold applied"
};

/// Traditional WCL: centroid weighted by received power.
LocationEstimate wcl(std::span<const Vec2> cr_locs,
                     std::span<const double> received_powers);

/// Cyclic WCL: centroid weighted by |R_hat_k|^2 CAC strengths.
LocationEstimate cyclic_wcl(std::span<const Vec2> cr_locs,
                            std::span<const double> cac_strengths);

/// Improved Cyclic WCL: restrict to CRs with phi_hat_k <= phi0, weights
/// taken from the M-th realization's CAC strengths.
LocationEstimate improved_cyclic_wcl(std::span<const Vec2> cr_locs,
                                     std::span<const double> cac_mth_strengths,
                                     std::span<const double> fvc_list,
                                     double phi0);

struct Kmeans1d {
  std::vector<int> labels;       // cluster index per value
  std::vector<double> centroids;
  bool degenerate = false;       // all values identical
};

/// Lloyd iteration on scalars with deterministic (min, max) initialization.
Kmeans1d kmeans_1d(std::span<const double> values, int k = 2);

struct ThresholdChoice {
  double phi0 = 0.0;
  bool degenerate = false;          // clustering could not separate values
  std::vector<double> v;            // ||L_hat(phi0)||^2 per candidate
  std::vector<double> candidates;   // sorted unique phi_hat values
  std::vector<int> labels;          // cluster of each candidate's v
  int nonopt_cluster = -1;
};

/// Suboptimal threshold via 2-means clustering of ||L_hat(phi0)||^2 over
/// candidate thresholds; the cluster containing the all-CRs candidate is the
/// non-optimal set and phi0 is the mean of the remaining candidates.
ThresholdChoice suboptimal_threshold(std::span<const Vec2> cr_locs,
                                     std::span<const double> cac_mth_strengths,
                                     std::span<const double> fvc_list);

}  // namespace cwcl
