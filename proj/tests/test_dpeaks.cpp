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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpeaks_oracle.hpp"
#include "gcma/dpeaks.hpp"
#include "test_util.hpp"

using namespace gcma;

TEST_CASE("pairwise distances match the direct norm") {
  Rng rng(1);
  Mat pts = testutil::randn(40, 5, rng);
  Mat d = dpeaks::pairwise_distances(pts);
  for (Index i = 0; i < 40; ++i) {
    CHECK(d(i, i) == 0.0);
    for (Index j = 0; j < 40; ++j)
      CHECK(d(i, j) == doctest::Approx((pts.row(i) - pts.row(j)).norm()).epsilon(1e-9));
  }
}

TEST_CASE("cutoff_distance picks the requested percentile") {
  // distances between 1-D points 0, 1, 3, 7: multiset {1, 2, 3, 4, 6, 7}
  Mat pts(4, 1);
  pts << 0.0, 1.0, 3.0, 7.0;
  Mat d = dpeaks::pairwise_distances(pts);
  // ceil(p/100 * 6) - 1 indexes the sorted multiset
  CHECK(dpeaks::cutoff_distance(d, 1.0) == doctest::Approx(1.0));
  CHECK(dpeaks::cutoff_distance(d, 50.0) == doctest::Approx(3.0));
  CHECK(dpeaks::cutoff_distance(d, 100.0) == doctest::Approx(7.0));
  CHECK_THROWS_AS(dpeaks::cutoff_distance(d, 0.0), ParameterError);
  CHECK_THROWS_AS(dpeaks::cutoff_distance(d, 101.0), ParameterError);
}

TEST_CASE("cutoff_distance rejects fully degenerate inputs") {
  Mat pts = Mat::Zero(5, 2);
  Mat d = dpeaks::pairwise_distances(pts);
  CHECK_THROWS_AS(dpeaks::cutoff_distance(d, 2.0), DegenerateDistanceError);
}

TEST_CASE("local density hand value") {
  // points 0, 1, 2 on a line with d_c = 1: rho_1 = 2 e^{-1}
  Mat pts(3, 1);
  pts << 0.0, 1.0, 2.0;
  Mat d = dpeaks::pairwise_distances(pts);
  Vec rho = dpeaks::local_density(d, 1.0);
  CHECK(rho(1) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(rho(0) == doctest::Approx(std::exp(-1.0) + std::exp(-4.0)).epsilon(1e-12));
  CHECK(rho(0) == rho(2));
}

TEST_CASE("delta ties break toward the lower index") {
  // two coincident-density points: index 0 counts as denser
  Mat pts(2, 1);
  pts << 0.0, 1.0;
  Mat d = dpeaks::pairwise_distances(pts);
  Vec rho = dpeaks::local_density(d, 1.0);
  CHECK(rho(0) == rho(1));
  auto prof = dpeaks::delta_distance(d, rho, 1.0);
  CHECK(prof.nn_higher[0] == -1);  // global maximizer by tie rule
  CHECK(prof.delta(0) == doctest::Approx(1.0));
  CHECK(prof.nn_higher[1] == 0);
  CHECK(prof.delta(1) == doctest::Approx(1.0));
}

TEST_CASE("brute-force oracle equivalence on random point sets") {
  for (int trial = 0; trial < 25; ++trial) {
    Rng rng(1000 + static_cast<std::uint64_t>(trial));
    const int n = 10 + static_cast<int>(rng.uniform_int(191));
    Mat pts = testutil::randn(n, 1 + static_cast<Index>(rng.uniform_int(6)), rng);
    Mat d = dpeaks::pairwise_distances(pts);
    const double dc = dpeaks::cutoff_distance(d, 2.0);

    Vec rho = dpeaks::local_density(d, dc);
    auto prof = dpeaks::delta_distance(d, rho, dc);
    auto centers = dpeaks::select_centers(rho, prof.delta, 64);
    auto labels = dpeaks::assign(n, centers, rho, prof.nn_higher);

    auto ref = oracle::dpeaks_reference(d, dc, 64);
    CHECK((rho - ref.rho).cwiseAbs().maxCoeff() == 0.0);
    CHECK((prof.delta - ref.delta).cwiseAbs().maxCoeff() == 0.0);
    CHECK(prof.nn_higher == ref.nn_higher);
    CHECK(centers == ref.centers);
    CHECK(labels == ref.labels);
  }
}

TEST_CASE("clustering is invariant under isometries") {
  std::vector<int> truth;
  Mat pts = testutil::gaussian_blobs(3, 40, 0.05, 1.0, 42, &truth);
  auto base = dpeaks::estimate_k(pts);

  // rotate by 0.7 rad and translate
  Mat rot(2, 2);
  rot << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
  Mat moved = pts * rot.transpose();
  moved.rowwise() += Eigen::RowVector2d(5.0, -3.0);
  auto rotated = dpeaks::estimate_k(moved);

  CHECK(base.state.k == rotated.state.k);
  CHECK(base.state.labels == rotated.state.labels);
}

TEST_CASE("two well-separated blobs give k = 2") {
  std::vector<int> truth;
  Mat pts = testutil::gaussian_blobs(2, 50, 0.05, 1.0, 7, &truth);
  auto est = dpeaks::estimate_k(pts);
  CHECK(est.state.k == 2);
  CHECK(est.votes.size() == dpeaks::kDefaultGrid.size());
  // perfect recovery up to label permutation: constant within each blob,
  // different across blobs
  for (std::size_t i = 0; i < truth.size(); ++i)
    CHECK(est.state.labels[i] == est.state.labels[truth[i] == 0 ? 0 : 50]);
  CHECK(est.state.labels[0] != est.state.labels[50]);
  // cluster sizes are 50/50
  CHECK(est.state.sizes == std::vector<int>{50, 50});
}

TEST_CASE("single point and single cluster conventions") {
  Mat one(1, 3);
  one << 1.0, 2.0, 3.0;
  auto est = dpeaks::estimate_k(one);
  CHECK(est.state.k == 1);
  CHECK(est.state.labels == std::vector<int>{0});

  // one tight blob: every percentile should vote k = 1
  std::vector<int> truth;
  Mat blob = testutil::gaussian_blobs(1, 60, 0.05, 1.0, 9, &truth);
  auto est1 = dpeaks::estimate_k(blob);
  CHECK(est1.state.k == 1);
}

TEST_CASE("finalize_state computes exact means and sizes") {
  Mat pts(4, 2);
  pts << 0.0, 0.0, 2.0, 0.0, 10.0, 10.0, 12.0, 10.0;
  std::vector<int> centers = {0, 2};
  std::vector<int> labels = {0, 0, 1, 1};
  auto st = dpeaks::finalize_state(pts, centers, labels);
  CHECK(st.k == 2);
  CHECK(st.means(0, 0) == 1.0);
  CHECK(st.means(1, 0) == 11.0);
  CHECK(st.means(1, 1) == 10.0);
  CHECK(st.sizes == std::vector<int>{2, 2});
  // cluster_loss: squared distances to means: 1+1 + 1+1 = 4
  CHECK(dpeaks::cluster_loss(pts, st) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("k-recovery across 2 to 6 components") {
  for (int k = 2; k <= 6; ++k) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Mat pts = testutil::gaussian_blobs(k, 50, 0.05, 0.5, 100 * k + seed);
      auto est = dpeaks::estimate_k(pts);
      if (est.state.k == k) hits++;
    }
    CHECK(hits >= 4);
  }
}
