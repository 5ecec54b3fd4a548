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

#include <cstdio>

#include "gcma/gat.hpp"
#include "gcma/graph.hpp"
#include "gcma/ops.hpp"
#include "test_util.hpp"

using namespace gcma;
using testutil::check_gradients;
using testutil::randn;
using testutil::weighted_scalar;

namespace {

constexpr double kGradTol = 1e-4;

SparseAdj random_sparse(int n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
  return adjacency_from_edges(n, edges);
}

}  // namespace

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng d = Rng::derived(42, 1), e = Rng::derived(42, 2);
  CHECK(d.next_u64() != e.next_u64());
  Rng u(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  (void)c;
}

TEST_CASE("spmm matches dense matmul") {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform_int(46));
    SparseAdj a = random_sparse(n, 0.2, 100 + trial);
    Mat x = randn(n, 7, rng);
    Tape t;
    Mat sparse_out = spmm(t, a, t.constant(x))->value;
    Mat dense_out = a.to_dense() * x;
    CHECK((sparse_out - dense_out).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("softmax rows sum to one") {
  Rng rng(2);
  Tape t;
  Mat out = softmax_row(t, t.constant(randn(20, 9, rng, 3.0)))->value;
  for (Index i = 0; i < out.rows(); ++i)
    CHECK(std::abs(out.row(i).sum() - 1.0) <= 1e-12);
}

TEST_CASE("elementwise dispatch matches the named ops") {
  Rng rng(3);
  Mat x = randn(4, 5, rng);
  Tape t;
  CHECK((elementwise(t, EwOp::kExp, t.constant(x))->value -
         exp_op(t, t.constant(x))->value).cwiseAbs().maxCoeff() == 0.0);
  CHECK((elementwise(t, EwOp::kSoftmaxRow, t.constant(x))->value -
         softmax_row(t, t.constant(x))->value).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("log rejects non-positive input") {
  Tape t;
  Mat bad(1, 2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(log_op(t, t.constant(bad)), NumericDomainError);
}

TEST_CASE("gradients: linear and elementwise ops") {
  Rng rng(10);
  ParamStore store;
  store.add("A", 4, 3).value = randn(4, 3, rng);
  store.add("B", 3, 5).value = randn(3, 5, rng);
  store.add("bias", 1, 5).value = randn(1, 5, rng);
  const Mat w1 = randn(4, 5, rng);
  const Mat w2 = randn(4, 3, rng);

  SUBCASE("matmul + bias") {
    auto f = [&](Tape& t) {
      Val y = add_rowvec(t, matmul(t, leaf(t, store.at("A")), leaf(t, store.at("B"))),
                         leaf(t, store.at("bias")));
      return weighted_scalar(t, y, w1);
    };
    CHECK(check_gradients(store, {"A", "B", "bias"}, f) < kGradTol);
  }
  SUBCASE("add, sub, hadamard, scale") {
    store.add("C", 4, 3).value = randn(4, 3, rng);
    auto f = [&](Tape& t) {
      Val a = leaf(t, store.at("A"));
      Val c = leaf(t, store.at("C"));
      Val y = scale(t, hadamard(t, add(t, a, c), sub(t, a, c)), 0.7);
      return weighted_scalar(t, y, w2);
    };
    CHECK(check_gradients(store, {"A", "C"}, f) < kGradTol);
  }
  SUBCASE("leaky_relu, exp, sigmoid") {
    auto f = [&](Tape& t) {
      Val a = leaf(t, store.at("A"));
      Val y = sigmoid(t, exp_op(t, scale(t, leaky_relu(t, a, 0.2), 0.5)));
      return weighted_scalar(t, y, w2);
    };
    CHECK(check_gradients(store, {"A"}, f) < kGradTol);
  }
  SUBCASE("log of positive input") {
    store.add("P", 4, 3).value = randn(4, 3, rng).cwiseAbs().array() + 0.5;
    auto f = [&](Tape& t) {
      return weighted_scalar(t, log_op(t, leaf(t, store.at("P"))), w2);
    };
    CHECK(check_gradients(store, {"P"}, f) < kGradTol);
  }
}

TEST_CASE("gradients: softmax, normalize, concat, selection") {
  Rng rng(11);
  ParamStore store;
  store.add("A", 5, 4).value = randn(5, 4, rng);
  store.add("B", 5, 3).value = randn(5, 3, rng);
  store.add("token", 1, 4).value = randn(1, 4, rng);

  SUBCASE("softmax_row") {
    const Mat w = randn(5, 4, rng);
    auto f = [&](Tape& t) {
      return weighted_scalar(t, softmax_row(t, leaf(t, store.at("A"))), w);
    };
    CHECK(check_gradients(store, {"A"}, f) < kGradTol);
  }
  SUBCASE("l2_normalize_row") {
    const Mat w = randn(5, 4, rng);
    auto f = [&](Tape& t) {
      return weighted_scalar(t, l2_normalize_row(t, leaf(t, store.at("A"))), w);
    };
    CHECK(check_gradients(store, {"A"}, f) < kGradTol);
  }
  SUBCASE("concat_cols") {
    const Mat w = randn(5, 7, rng);
    auto f = [&](Tape& t) {
      return weighted_scalar(
          t, concat_cols(t, leaf(t, store.at("A")), leaf(t, store.at("B"))), w);
    };
    CHECK(check_gradients(store, {"A", "B"}, f) < kGradTol);
  }
  SUBCASE("select_rows") {
    const Mat w = randn(3, 4, rng);
    auto f = [&](Tape& t) {
      return weighted_scalar(t, select_rows(t, leaf(t, store.at("A")), {0, 2, 4}), w);
    };
    CHECK(check_gradients(store, {"A"}, f) < kGradTol);
  }
  SUBCASE("remask_rows") {
    const Mat w = randn(5, 4, rng);
    auto f = [&](Tape& t) {
      return weighted_scalar(t,
                             remask_rows(t, leaf(t, store.at("A")), {1, 3},
                                         leaf(t, store.at("token"))),
                             w);
    };
    CHECK(check_gradients(store, {"A", "token"}, f) < kGradTol);
  }
}

TEST_CASE("gradients: mixing and reductions") {
  Rng rng(12);
  ParamStore store;
  store.add("A", 6, 3).value = randn(6, 3, rng);
  store.add("B", 6, 3).value = randn(6, 3, rng);
  Param& eps = store.add("eps", 1, 1);
  eps.value(0, 0) = 0.37;
  const Mat target = randn(6, 3, rng);
  const Mat w = randn(6, 3, rng);

  SUBCASE("scalar_mix") {
    auto f = [&](Tape& t) {
      Val y = scalar_mix(t, leaf(t, store.at("A")), leaf(t, store.at("B")),
                         leaf(t, store.at("eps")));
      return weighted_scalar(t, y, w);
    };
    CHECK(check_gradients(store, {"A", "B", "eps"}, f) < kGradTol);
  }
  SUBCASE("mse_const and mean_all") {
    auto f = [&](Tape& t) {
      return mse_const(t, leaf(t, store.at("A")), target);
    };
    CHECK(check_gradients(store, {"A"}, f) < kGradTol);
    auto g = [&](Tape& t) { return mean_all(t, leaf(t, store.at("A"))); };
    CHECK(check_gradients(store, {"A"}, g) < kGradTol);
  }
  SUBCASE("weighted_sum") {
    auto f = [&](Tape& t) {
      Val s1 = sum_all(t, leaf(t, store.at("A")));
      Val s2 = mean_all(t, leaf(t, store.at("B")));
      return weighted_sum(t, {{0.25, s1}, {3.0, s2}});
    };
    CHECK(check_gradients(store, {"A", "B"}, f) < kGradTol);
  }
}

TEST_CASE("gradients: spmm") {
  Rng rng(13);
  SparseAdj a = random_sparse(8, 0.4, 99);
  ParamStore store;
  store.add("X", 8, 3).value = randn(8, 3, rng);
  const Mat w = randn(8, 3, rng);
  auto f = [&](Tape& t) {
    return weighted_scalar(t, spmm(t, a, leaf(t, store.at("X"))), w);
  };
  CHECK(check_gradients(store, {"X"}, f) < kGradTol);
}

TEST_CASE("gradients: contrastive and clustering losses") {
  Rng rng(14);
  ParamStore store;
  store.add("L", 6, 6).value = randn(6, 6, rng);
  store.add("Z", 9, 4).value = randn(9, 4, rng);
  store.add("MU", 3, 4).value = randn(3, 4, rng);

  SUBCASE("info_nce") {
    auto f = [&](Tape& t) { return info_nce(t, leaf(t, store.at("L"))); };
    CHECK(check_gradients(store, {"L"}, f) < kGradTol);
  }
  SUBCASE("student_q") {
    const Mat w = randn(9, 3, rng);
    auto f = [&](Tape& t) {
      return weighted_scalar(
          t, student_q(t, leaf(t, store.at("Z")), leaf(t, store.at("MU")), 1.0), w);
    };
    CHECK(check_gradients(store, {"Z", "MU"}, f) < kGradTol);
  }
  SUBCASE("student_q with v=3") {
    const Mat w = randn(9, 3, rng);
    auto f = [&](Tape& t) {
      return weighted_scalar(
          t, student_q(t, leaf(t, store.at("Z")), leaf(t, store.at("MU")), 3.0), w);
    };
    CHECK(check_gradients(store, {"Z", "MU"}, f) < kGradTol);
  }
  SUBCASE("kl against a constant target") {
    const Mat p = testutil::rand_stochastic(9, 3, rng);
    auto f = [&](Tape& t) {
      Val q = student_q(t, leaf(t, store.at("Z")), leaf(t, store.at("MU")), 1.0);
      return kl_const_p(t, p, q);
    };
    CHECK(check_gradients(store, {"Z", "MU"}, f) < kGradTol);
  }
  SUBCASE("cluster_wcss") {
    const std::vector<int> labels = {0, 1, 2, 0, 1, 2, 0, 1, 2};
    const Mat means = randn(3, 4, rng);
    auto f = [&](Tape& t) {
      return cluster_wcss(t, leaf(t, store.at("Z")), labels, means);
    };
    CHECK(check_gradients(store, {"Z"}, f) < kGradTol);
  }
  SUBCASE("gae_recon_loss") {
    SparseAdj a = random_sparse(9, 0.3, 55);
    auto f = [&](Tape& t) {
      return gae_recon_loss(t, leaf(t, store.at("Z")), a, 2.5);
    };
    CHECK(check_gradients(store, {"Z"}, f) < kGradTol);
  }
}

TEST_CASE("gradients: gat attention") {
  Rng rng(15);
  SparseAdj a = random_sparse(7, 0.4, 77);
  auto nbrs = neighbors_with_self(a);
  const int heads = 2, out_dim = 3;
  ParamStore store;
  store.add("WH", 7, heads * out_dim).value = randn(7, heads * out_dim, rng);
  store.add("as", 1, heads * out_dim).value = randn(1, heads * out_dim, rng);
  store.add("ad", 1, heads * out_dim).value = randn(1, heads * out_dim, rng);

  SUBCASE("concat heads") {
    const Mat w = randn(7, heads * out_dim, rng);
    auto f = [&](Tape& t) {
      Val y = gat_attention(t, nbrs, leaf(t, store.at("WH")), leaf(t, store.at("as")),
                            leaf(t, store.at("ad")), heads, 0.2, false);
      return weighted_scalar(t, y, w);
    };
    CHECK(check_gradients(store, {"WH", "as", "ad"}, f) < kGradTol);
  }
  SUBCASE("averaged heads") {
    const Mat w = randn(7, out_dim, rng);
    auto f = [&](Tape& t) {
      Val y = gat_attention(t, nbrs, leaf(t, store.at("WH")), leaf(t, store.at("as")),
                            leaf(t, store.at("ad")), heads, 0.2, true);
      return weighted_scalar(t, y, w);
    };
    CHECK(check_gradients(store, {"WH", "as", "ad"}, f) < kGradTol);
  }
}

TEST_CASE("adam converges on a quadratic bowl") {
  // minimize ||X - T||^2
  Rng rng(20);
  const Mat target = randn(3, 3, rng);
  ParamStore store;
  store.add("X", 3, 3).value = randn(3, 3, rng);
  for (int step = 0; step < 2000; ++step) {
    Tape t;
    Val loss = mse_const(t, leaf(t, store.at("X")), target);
    t.backward(loss);
    store.adam_step(0.05);
  }
  CHECK((store.at("X").value - target).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("adam leaves zero-gradient parameters untouched") {
  Rng rng(21);
  ParamStore store;
  store.add("used", 2, 2).value = randn(2, 2, rng);
  store.add("frozen", 2, 2).value = randn(2, 2, rng);
  const Mat before = store.at("frozen").value;
  Tape t;
  Val loss = mse_const(t, leaf(t, store.at("used")), Mat::Zero(2, 2));
  t.backward(loss);
  store.adam_step(0.01);
  CHECK((store.at("frozen").value - before).cwiseAbs().maxCoeff() == 0.0);
  CHECK(store.at("frozen").steps == 0);
}

TEST_CASE("adam aborts on NaN gradients") {
  ParamStore store;
  store.add("X", 1, 1).value(0, 0) = 1.0;
  store.at("X").grad = Mat::Constant(1, 1, std::nan(""));
  CHECK_THROWS_AS(store.adam_step(0.01), TrainingDivergence);
}

TEST_CASE("checkpoint round trip restores values") {
  Rng rng(22);
  ParamStore store;
  store.add("a.W", 3, 4).value = randn(3, 4, rng);
  store.add("b.W", 1, 1).value(0, 0) = -0.25;
  const std::string path = "ckpt_test.bin";
  store.save(path);

  ParamStore loaded;
  loaded.add("a.W", 3, 4);
  loaded.add("b.W", 1, 1);
  loaded.load(path);
  CHECK((loaded.at("a.W").value - store.at("a.W").value).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.at("b.W").value(0, 0) == -0.25);
  std::remove(path.c_str());
}

TEST_CASE("glorot init is deterministic and bounded") {
  Mat w1(50, 30), w2(50, 30);
  Rng r1(5), r2(5);
  glorot_init(w1, r1);
  glorot_init(w2, r2);
  CHECK((w1 - w2).cwiseAbs().maxCoeff() == 0.0);
  const double limit = std::sqrt(6.0 / (50 + 30));
  CHECK(w1.cwiseAbs().maxCoeff() <= limit);
}
