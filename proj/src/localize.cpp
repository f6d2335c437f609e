#include "cwcl/localize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cwcl {

namespace {

LocationEstimate weighted_centroid(std::span<const Vec2> locs,
                                   std::span<const double> weights,
                                   std::span<const std::size_t> subset) {
  double wx = 0.0, wy = 0.0, wsum = 0.0;
  for (const auto k : subset) {
    if (weights[k] < 0.0)
      throw std::invalid_argument("negative weight at CR " + std::to_string(k));
    wx += weights[k] * locs[k].x;
    wy += weights[k] * locs[k].y;
    wsum += weights[k];
  }
  if (wsum <= 0.0)
    throw std::domain_error("all weights zero: no localization possible");
  LocationEstimate est;
  est.x = wx / wsum;
  est.y = wy / wsum;
  est.included_crs.assign(subset.begin(), subset.end());
  return est;
}

std::vector<std::size_t> all_indices(std::size_t k) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

LocationEstimate wcl(std::span<const Vec2> cr_locs,
                     std::span<const double> received_powers) {
  if (cr_locs.empty() || cr_locs.size() != received_powers.size())
    throw std::invalid_argument("locations/powers size mismatch");
  return weighted_centroid(cr_locs, received_powers,
                           all_indices(cr_locs.size()));
}

LocationEstimate cyclic_wcl(std::span<const Vec2> cr_locs,
                            std::span<const double> cac_strengths) {
  if (cr_locs.empty() || cr_locs.size() != cac_strengths.size())
    throw std::invalid_argument("locations/strengths size mismatch");
  return weighted_centroid(cr_locs, cac_strengths,
                           all_indices(cr_locs.size()));
}

LocationEstimate improved_cyclic_wcl(std::span<const Vec2> cr_locs,
                                     std::span<const double> cac_mth_strengths,
                                     std::span<const double> fvc_list,
                                     double phi0) {
  const std::size_t k = cr_locs.size();
  if (k == 0 || cac_mth_strengths.size() != k || fvc_list.size() != k)
    throw std::invalid_argument("input size mismatch");
  std::vector<std::size_t> subset;
  double min_phi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    min_phi = std::min(min_phi, fvc_list[i]);
    if (fvc_list[i] <= phi0) subset.push_back(i);
  }
  if (subset.empty())
    throw std::domain_error("no CR passes phi0; smallest phi_hat is " +
                            std::to_string(min_phi));
  auto est = weighted_centroid(cr_locs, cac_mth_strengths, subset);
  est.phi0_used = phi0;
  return est;
}

Kmeans1d kmeans_1d(std::span<const double> values, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (values.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("fewer values than clusters");

  Kmeans1d out;
  const auto [min_it, max_it] = std::minmax_element(values.begin(),
                                                    values.end());
  if (*min_it == *max_it) {
    out.degenerate = true;
    out.labels.assign(values.size(), 0);
    out.centroids.assign(static_cast<std::size_t>(k), *min_it);
    return out;
  }

  // Deterministic init: centroids spread linearly from min to max.
  out.centroids.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c)
    out.centroids[static_cast<std::size_t>(c)] =
        *min_it + (*max_it - *min_it) * (k == 1 ? 0.0 : double(c) / (k - 1));

  out.labels.assign(values.size(), 0);
  for (int iter = 0; iter < 200; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      int best = 0;
      double best_d = std::abs(values[i] - out.centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d =
            std::abs(values[i] - out.centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (out.labels[i] != best) {
        out.labels[i] = best;
        changed = true;
      }
    }
    for (int c = 0; c < k; ++c) {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < values.size(); ++i)
        if (out.labels[i] == c) {
          sum += values[i];
          ++n;
        }
      if (n > 0) out.centroids[static_cast<std::size_t>(c)] = sum / double(n);
    }
    if (!changed) break;
  }
  return out;
}

ThresholdChoice suboptimal_threshold(std::span<const Vec2> cr_locs,
                                     std::span<const double> cac_mth_strengths,
                                     std::span<const double> fvc_list) {
  const std::size_t k = cr_locs.size();
  if (k < 2) throw std::invalid_argument("need at least 2 CRs");
  if (cac_mth_strengths.size() != k || fvc_list.size() != k)
    throw std::invalid_argument("input size mismatch");

  ThresholdChoice out;
  out.candidates.assign(fvc_list.begin(), fvc_list.end());
  std::sort(out.candidates.begin(), out.candidates.end());
  out.candidates.erase(
      std::unique(out.candidates.begin(), out.candidates.end()),
      out.candidates.end());

  out.v.reserve(out.candidates.size());
  for (const double phi0 : out.candidates) {
    const auto est =
        improved_cyclic_wcl(cr_locs, cac_mth_strengths, fvc_list, phi0);
    out.v.push_back(est.x * est.x + est.y * est.y);
  }

  const auto km = kmeans_1d(out.v, 2);
  out.labels = km.labels;
  if (km.degenerate) {
    out.degenerate = true;
    out.phi0 = out.candidates.back();
    return out;
  }
  // The candidate equal to the largest phi_hat includes every CR; its
  // cluster is the non-optimal set.
  out.nonopt_cluster = km.labels.back();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < out.candidates.size(); ++i)
    if (km.labels[i] != out.nonopt_cluster) {
      sum += out.candidates[i];
      ++n;
    }
  if (n == 0) {
    out.degenerate = true;
    out.phi0 = out.candidates.back();
  } else {
    out.phi0 = sum / double(n);
  }
  return out;
}

}  // namespace cwcl
