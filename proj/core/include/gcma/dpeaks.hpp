/*
 * Copyright 2026 The GCMA Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GCMA_DPEAKS_HPP
#define GCMA_DPEAKS_HPP

#include <string>
#include <vector>

#include "gcma/tensor.hpp"

namespace gcma {

/// Density-peaks profile: Gaussian-kernel local density, distance to the
/// nearest denser point, and that neighbor's index (-1 for the global
/// density maximizer).
struct DensityProfile {
  Vec rho;
  Vec delta;
  std::vector<int> nn_higher;
  double d_c = 0.0;
};

struct ClusterState {
  int k = 0;
  std::vector<int> centers;
  std::vector<int> labels;
  Mat means;               // k x d, exact cluster means
  std::vector<int> sizes;  // N_k
};

namespace dpeaks {

/// Default percentile grid for the threshold vote (percent of the sorted
/// pairwise-distance multiset), bracketing the classic 1-2% heuristic.
inline const std::vector<double> kDefaultGrid = {1.0, 1.5, 2.0, 2.5, 3.0};
constexpr int kDefaultKMax = 64;

Mat pairwise_distances(const Mat& points);

/// Given percentile of the sorted off-diagonal distances (one value per
/// unordered pair). Throws DegenerateDistanceError when all points coincide.
double cutoff_distance(const Mat& dists, double percentile);

/// rho_i = sum_{j != i} exp(-(d_ij / d_c)^2).
Vec local_density(const Mat& dists, double d_c);

/// delta_i = min distance to a denser point (density ties broken by lower
/// index counting as denser); the global maximizer gets max_j d_ij and
/// nn_higher -1.
DensityProfile delta_distance(const Mat& dists, const Vec& rho, double d_c);

/// Normalized gamma = rho~ * delta~ scores, one per point.
Vec gamma_scores(const Vec& rho, const Vec& delta);

/// Centers from the largest gap ratio in sorted gamma; k is capped at
/// min(n-1, k_max). Falls back to k = 1 when every gamma is equal.
std::vector<int> select_centers(const Vec& rho, const Vec& delta,
                                int k_max = kDefaultKMax);

/// CFSFDP assignment: centers keep their own label; the rest inherit
/// nn_higher's label in decreasing-density order.
std::vector<int> assign(int n, const std::vector<int>& centers, const Vec& rho,
                        const std::vector<int>& nn_higher);

ClusterState finalize_state(const Mat& points, const std::vector<int>& centers,
                            const std::vector<int>& labels);

struct EstimateResult {
  ClusterState state;
  double d_c_used = 0.0;
  double percentile_used = 0.0;
  DensityProfile profile;  // from the winning percentile
  std::vector<int> votes;  // k per grid entry
};

/// Threshold iteration realized as a percentile-grid vote: run the full
/// pipeline per percentile, take the modal k (ties toward smaller k), and
/// return the state from the median winning percentile.
EstimateResult estimate_k(const Mat& embedding,
                          const std::vector<double>& percentile_grid = kDefaultGrid,
                          int k_max = kDefaultKMax);

/// Within-cluster sum of squared distances to the stored means.
double cluster_loss(const Mat& embedding, const ClusterState& state);

/// Per-node (rho, delta, gamma, label) CSV for decision-graph plotting.
void dump_decision_csv(const std::string& path, const DensityProfile& profile,
                       const Vec& gamma, const std::vector<int>& labels);

}  // namespace dpeaks

}  // namespace gcma

#endif  // GCMA_DPEAKS_HPP
