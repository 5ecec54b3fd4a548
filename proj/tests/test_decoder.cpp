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

#include "gcma/decoder.hpp"
#include "test_util.hpp"

using namespace gcma;
using testutil::randn;

TEST_CASE("pair_score hand values") {
  Vec a(2), b(2), c(2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  c << 1.0, 1.0;
  // identical directions, xi = 1: exp(1)
  CHECK(decoder::pair_score(a, 2.0 * a, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  // orthogonal: exp(0) = 1
  CHECK(decoder::pair_score(a, b, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  // 45 degrees, xi = 0.5: exp(sqrt(2)) ~ 4.113
  CHECK(decoder::pair_score(a, c, 0.5) == doctest::Approx(std::exp(std::sqrt(2.0))).epsilon(1e-9));
  CHECK_THROWS_AS(decoder::pair_score(a, b, 0.0), ParameterError);
}

TEST_CASE("info_nce hand value on a 2x2 identity-structured logit matrix") {
  // logits [[1,0],[0,1]]: loss = log(e + 1) - 1 = -log(e / (e + 1)) ~ 0.3133
  Tape t;
  Mat logits(2, 2);
  logits << 1.0, 0.0, 0.0, 1.0;
  const double loss = info_nce(t, t.constant(logits))->value(0, 0);
  CHECK(loss == doctest::Approx(std::log(std::exp(1.0) + 1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("info_loss with a single masked node is zero") {
  // one positive and no negatives: the softmax is trivially 1
  ParamStore store;
  Rng rng(1);
  decoder::init_params(store, 5, rng);
  Tape t;
  Val v = t.constant(randn(4, 5, rng));
  Mat s1 = randn(4, 5, rng), s2 = randn(4, 5, rng);
  Val loss = decoder::info_loss(t, store, v, s1, s2, LossWeights{}, {2});
  CHECK(std::abs(loss->value(0, 0)) <= 1e-12);
}

TEST_CASE("info_loss edge cases and invariances") {
  ParamStore store;
  Rng rng(2);
  decoder::init_params(store, 5, rng);
  Mat vmat = randn(6, 5, rng);
  Mat s1 = randn(6, 5, rng), s2 = randn(6, 5, rng);
  const std::vector<int> masked = {0, 2, 3, 5};

  SUBCASE("empty masked set is a usage error") {
    Tape t;
    CHECK_THROWS_AS(decoder::info_loss(t, store, t.constant(vmat), s1, s2,
                                       LossWeights{}, {}),
                    UsageError);
  }
  SUBCASE("all-zero lambdas give a zero loss") {
    Tape t;
    LossWeights w{0.0, 0.0, 0.0, 0.2};
    Val loss = decoder::info_loss(t, store, t.constant(vmat), s1, s2, w, masked);
    CHECK(loss->value(0, 0) == 0.0);
  }
  SUBCASE("loss is invariant to uniformly rescaling the targets") {
    // the concatenated target is row-normalized, so only a shared positive
    // factor leaves every head's cosine unchanged
    Tape t;
    const double l1 = decoder::info_loss(t, store, t.constant(vmat), s1, s2,
                                         LossWeights{}, masked)->value(0, 0);
    const double l2 = decoder::info_loss(t, store, t.constant(vmat),
                                         Mat(3.0 * s1), Mat(3.0 * s2),
                                         LossWeights{}, masked)->value(0, 0);
    CHECK(l1 == doctest::Approx(l2).epsilon(1e-9));
  }
  SUBCASE("lambda weights scale their terms additively") {
    Tape t;
    const double l_full = decoder::info_loss(t, store, t.constant(vmat), s1, s2,
                                             LossWeights{1, 1, 1, 0.2}, masked)->value(0, 0);
    double sum_parts = 0.0;
    for (int head = 0; head < 3; ++head) {
      LossWeights w{0, 0, 0, 0.2};
      (head == 0 ? w.lambda1 : head == 1 ? w.lambda2 : w.lambda3) = 1.0;
      Tape t2;
      sum_parts += decoder::info_loss(t2, store, t2.constant(vmat), s1, s2, w,
                                      masked)->value(0, 0);
    }
    CHECK(l_full == doctest::Approx(sum_parts).epsilon(1e-9));
  }
}

TEST_CASE("gradients through info_loss and remask") {
  ParamStore store;
  Rng rng(3);
  decoder::init_params(store, 4, rng);
  store.add("Z", 5, 4).value = randn(5, 4, rng);
  Mat s1 = randn(5, 4, rng), s2 = randn(5, 4, rng);
  const std::vector<int> masked = {1, 2, 4};

  auto f = [&](Tape& t) {
    Val v_hat = decoder::remask(t, store, leaf(t, store.at("Z")), masked);
    return decoder::info_loss(t, store, v_hat, s1, s2, LossWeights{0.7, 1.3, 0.4, 0.3},
                              masked);
  };
  const double err = testutil::check_gradients(
      store, {"Z", "decoder.mask_token", "proj.P1.W0", "proj.P2.W1", "proj.P3.W0"}, f);
  CHECK(err < 1e-4);
}

TEST_CASE("remask replaces exactly the requested rows") {
  ParamStore store;
  Rng rng(4);
  decoder::init_params(store, 3, rng);
  store.at("decoder.mask_token").value = randn(1, 3, rng);
  Tape t;
  Mat z = randn(4, 3, rng);
  Mat out = decoder::remask(t, store, t.constant(z), {1, 3})->value;
  CHECK((out.row(0) - z.row(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((out.row(2) - z.row(2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((out.row(1) - store.at("decoder.mask_token").value.row(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((out.row(3) - store.at("decoder.mask_token").value.row(0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gae positive weight and reconstruction loss hand check") {
  SparseAdj a = adjacency_from_edges(3, {{0, 1}});
  // 9 pairs, 2 stored entries -> pos_weight = 7/2
  CHECK(decoder::adjacency_pos_weight(a) == doctest::Approx(3.5).epsilon(1e-12));

  Rng rng(5);
  Mat z = randn(3, 2, rng);
  Tape t;
  const double loss = gae_recon_loss(t, t.constant(z), a, 3.5)->value(0, 0);
  // direct dense evaluation of the weighted BCE
  Mat logits = z * z.transpose();
  Mat dense = a.to_dense();
  double expect = 0.0;
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) {
      const double x = logits(i, j);
      const double sp = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
      expect += dense(i, j) != 0.0 ? 3.5 * (sp - x) : sp;
    }
  expect /= 9.0;
  CHECK(loss == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("structural_target matches a forward gae_embed pass") {
  Graph g = testutil::two_block_graph(6, 4, 0.5, 0.1, 0.2, 6);
  decoder::GaeConfig cfg{4, 8, 5};
  ParamStore store;
  Rng rng(7);
  decoder::gae_init_params(store, cfg, rng);
  SparseAdj norm = normalize_adjacency(g.adj);

  Mat s1 = decoder::structural_target(store, cfg, norm, g.features);
  Tape t;
  Mat direct = decoder::gae_embed(t, store, cfg, norm, t.constant(g.features))->value;
  CHECK((s1 - direct).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s1.rows() == g.n);
  CHECK(s1.cols() == cfg.embed_dim);
}

TEST_CASE("gradients through the gae loss") {
  Graph g = testutil::two_block_graph(5, 3, 0.6, 0.2, 0.3, 8);
  decoder::GaeConfig cfg{3, 6, 4};
  ParamStore store;
  Rng rng(9);
  decoder::gae_init_params(store, cfg, rng);
  SparseAdj norm = normalize_adjacency(g.adj);
  auto f = [&](Tape& t) {
    return decoder::gae_loss(t, store, cfg, norm, g.adj, t.constant(g.features));
  };
  CHECK(testutil::check_gradients(store, {"gae.W0", "gae.W1"}, f) < 1e-4);
}
