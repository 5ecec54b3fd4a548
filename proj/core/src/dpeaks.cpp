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

#include "gcma/dpeaks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "gcma/errors.hpp"

namespace gcma::dpeaks {

Mat pairwise_distances(const Mat& points) {
  const Index n = points.rows();
  Vec sq = points.rowwise().squaredNorm();
  Mat d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
           2.0 * points * points.transpose();
  Mat d = d2.cwiseMax(0.0).cwiseSqrt();
  d.diagonal().setZero();
  return d;
}

double cutoff_distance(const Mat& dists, double percentile) {
  const Index n = dists.rows();
  if (n < 2) throw ParameterError("cutoff_distance: need at least two points");
  if (percentile <= 0.0 || percentile > 100.0)
    throw ParameterError("cutoff_distance: percentile must be in (0, 100]");
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) all.push_back(dists(i, j));
  std::sort(all.begin(), all.end());
  if (all.back() <= 0.0)
    throw DegenerateDistanceError("cutoff_distance: all points are identical");
  const auto m = static_cast<double>(all.size());
  auto idx = static_cast<std::size_t>(
      std::clamp(std::ceil(percentile / 100.0 * m) - 1.0, 0.0, m - 1.0));
  double dc = all[idx];
  // a zero bandwidth collapses the Gaussian kernel; move up to the first
  // positive distance
  while (dc <= 0.0 && idx + 1 < all.size()) dc = all[++idx];
  return dc;
}

Vec local_density(const Mat& dists, double d_c) {
  if (d_c <= 0.0) throw ParameterError("local_density: d_c must be positive");
  const Index n = dists.rows();
  Vec rho = Vec::Zero(n);
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double r = dists(i, j) / d_c;
      s += std::exp(-r * r);
    }
    rho(i) = s;
  }
  return rho;
}

namespace {
// ties broken by index: lower index counts as denser
inline bool denser(const Vec& rho, Index a, Index b) {
  return rho(a) > rho(b) || (rho(a) == rho(b) && a < b);
}
}  // namespace

DensityProfile delta_distance(const Mat& dists, const Vec& rho, double d_c) {
  const Index n = dists.rows();
  DensityProfile p;
  p.d_c = d_c;
  p.rho = rho;
  p.delta = Vec::Zero(n);
  p.nn_higher.assign(static_cast<std::size_t>(n), -1);
  if (n == 1) return p;  // single point: delta 0 by convention
  for (Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = -1;
    for (Index j = 0; j < n; ++j) {
      if (j == i || !denser(rho, j, i)) continue;
      if (dists(i, j) < best) {
        best = dists(i, j);
        best_j = static_cast<int>(j);
      }
    }
    if (best_j < 0) {
      p.delta(i) = dists.row(i).maxCoeff();
    } else {
      p.delta(i) = best;
      p.nn_higher[static_cast<std::size_t>(i)] = best_j;
    }
  }
  return p;
}

namespace {
Vec minmax_norm(const Vec& v) {
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi - lo < 1e-300) return Vec::Ones(v.size());
  return (v.array() - lo) / (hi - lo);
}
}  // namespace

Vec gamma_scores(const Vec& rho, const Vec& delta) {
  return minmax_norm(rho).cwiseProduct(minmax_norm(delta));
}

std::vector<int> select_centers(const Vec& rho, const Vec& delta, int k_max) {
  const Index n = rho.size();
  if (n < 1) throw ParameterError("select_centers: empty input");
  Vec gamma = gamma_scores(rho, delta);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return gamma(a) > gamma(b); });

  if (gamma.maxCoeff() - gamma.minCoeff() < 1e-15)
    return {order.front()};

  const int limit = static_cast<int>(std::min<Index>(n - 1, k_max));
  int best_k = 1;
  double best_ratio = -1.0;
  // additive smoothing: min-max normalization forces at least one exact
  // zero into gamma, and a raw ratio explodes on the near-zero tail
  constexpr double kSmooth = 1e-3;
  for (int m = 1; m <= limit; ++m) {
    const double top = gamma(order[static_cast<std::size_t>(m) - 1]) + kSmooth;
    const double next = gamma(order[static_cast<std::size_t>(m)]) + kSmooth;
    const double ratio = top / next;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_k = m;
    }
  }
  return {order.begin(), order.begin() + best_k};
}

std::vector<int> assign(int n, const std::vector<int>& centers, const Vec& rho,
                        const std::vector<int>& nn_higher) {
  if (centers.empty()) throw ParameterError("assign: no centers");
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (std::size_t c = 0; c < centers.size(); ++c)
    labels[static_cast<std::size_t>(centers[c])] = static_cast<int>(c);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rho(a) > rho(b); });

  for (int i : order) {
    if (labels[static_cast<std::size_t>(i)] >= 0) continue;
    const int up = nn_higher[static_cast<std::size_t>(i)];
    // the density-desc sweep guarantees the denser neighbor is labeled;
    // the global maximizer is always a center or labeled via -1 guard
    labels[static_cast<std::size_t>(i)] = up >= 0 ? labels[static_cast<std::size_t>(up)] : 0;
  }
  return labels;
}

ClusterState finalize_state(const Mat& points, const std::vector<int>& centers,
                            const std::vector<int>& labels) {
  ClusterState st;
  st.k = static_cast<int>(centers.size());
  st.centers = centers;
  st.labels = labels;
  st.means = Mat::Zero(st.k, points.cols());
  st.sizes.assign(static_cast<std::size_t>(st.k), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    st.means.row(labels[i]) += points.row(static_cast<Index>(i));
    st.sizes[static_cast<std::size_t>(labels[i])]++;
  }
  for (int c = 0; c < st.k; ++c)
    if (st.sizes[static_cast<std::size_t>(c)] > 0)
      st.means.row(c) /= static_cast<double>(st.sizes[static_cast<std::size_t>(c)]);
  return st;
}

EstimateResult estimate_k(const Mat& embedding,
                          const std::vector<double>& percentile_grid, int k_max) {
  if (percentile_grid.empty()) throw ParameterError("estimate_k: empty grid");
  const int n = static_cast<int>(embedding.rows());
  if (n == 1) {
    EstimateResult r;
    r.state.k = 1;
    r.state.centers = {0};
    r.state.labels = {0};
    r.state.means = embedding;
    r.state.sizes = {1};
    r.profile.rho = Vec::Zero(1);
    r.profile.delta = Vec::Zero(1);
    r.profile.nn_higher = {-1};
    r.votes = std::vector<int>(percentile_grid.size(), 1);
    return r;
  }

  Mat dists = pairwise_distances(embedding);

  struct Run {
    double percentile;
    DensityProfile profile;
    std::vector<int> centers;
  };
  std::vector<Run> runs;
  std::vector<int> votes;
  for (double p : percentile_grid) {
    Run run;
    run.percentile = p;
    const double dc = cutoff_distance(dists, p);
    Vec rho = local_density(dists, dc);
    run.profile = delta_distance(dists, rho, dc);
    run.centers = select_centers(rho, run.profile.delta, k_max);
    votes.push_back(static_cast<int>(run.centers.size()));
    runs.push_back(std::move(run));
  }

  // modal k, ties toward smaller k
  std::map<int, int> counts;
  for (int k : votes) counts[k]++;
  int modal_k = votes.front(), best_count = -1;
  for (const auto& [k, c] : counts)
    if (c > best_count) {
      best_count = c;
      modal_k = k;
    }

  std::vector<std::size_t> winners;
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (votes[i] == modal_k) winners.push_back(i);
  const std::size_t pick = winners[(winners.size() - 1) / 2];  // lower median

  const Run& win = runs[pick];
  auto labels = assign(n, win.centers, win.profile.rho, win.profile.nn_higher);

  EstimateResult r;
  r.state = finalize_state(embedding, win.centers, labels);
  r.d_c_used = win.profile.d_c;
  r.percentile_used = win.percentile;
  r.profile = win.profile;
  r.votes = votes;
  return r;
}

double cluster_loss(const Mat& embedding, const ClusterState& state) {
  double loss = 0.0;
  for (std::size_t i = 0; i < state.labels.size(); ++i)
    loss += (embedding.row(static_cast<Index>(i)) - state.means.row(state.labels[i]))
                .squaredNorm();
  return loss;
}

void dump_decision_csv(const std::string& path, const DensityProfile& profile,
                       const Vec& gamma, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path);
  out << "node,rho,delta,gamma,label\n";
  out.precision(17);
  for (Index i = 0; i < profile.rho.size(); ++i)
    out << i << "," << profile.rho(i) << "," << profile.delta(i) << ","
        << gamma(i) << "," << labels[static_cast<std::size_t>(i)] << "\n";
}

}  // namespace gcma::dpeaks
