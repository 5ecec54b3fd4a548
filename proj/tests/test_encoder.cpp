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

#include "gcma/encoder.hpp"
#include "test_util.hpp"

using namespace gcma;
using testutil::randn;

namespace {

EncoderConfig small_config(int d_in) {
  EncoderConfig cfg;
  cfg.d_in = d_in;
  cfg.embed_dim = 6;
  cfg.hidden_heads = 2;
  cfg.head_dim = 4;
  cfg.ae_hidden = {10, 8};
  return cfg;
}

}  // namespace

TEST_CASE("encoder shapes and fusion init") {
  Graph g = testutil::two_block_graph(8, 5, 0.5, 0.1, 0.2, 1);
  EncoderConfig cfg = small_config(5);
  ParamStore store;
  Rng rng(2);
  encoder::init_params(store, cfg, rng);
  CHECK(encoder::current_eps(store) == doctest::Approx(0.1).epsilon(1e-12));

  Tape t;
  auto nbrs = neighbors_with_self(g.adj);
  Val x = t.constant(g.features);
  Val zm = encoder::encode_masked(t, store, cfg, nbrs, x);
  Val zae = encoder::encode_ae(t, store, cfg, x);
  Val rec = encoder::decode_ae(t, store, cfg, zae);
  Val z = encoder::fuse(t, store, zm, zae);
  CHECK(zm->value.rows() == g.n);
  CHECK(zm->value.cols() == cfg.embed_dim);
  CHECK(zae->value.rows() == g.n);
  CHECK(zae->value.cols() == cfg.embed_dim);
  CHECK(rec->value.cols() == cfg.d_in);
  CHECK(z->value.rows() == g.n);
  // with eps = 0.1 the blend sits between its inputs
  Mat expect = 0.9 * zm->value + 0.1 * zae->value;
  CHECK((z->value - expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fusion endpoints: eps 0 and 1 recover the inputs") {
  Graph g = testutil::two_block_graph(6, 4, 0.5, 0.1, 0.2, 3);
  EncoderConfig cfg = small_config(4);
  ParamStore store;
  Rng rng(4);
  encoder::init_params(store, cfg, rng);
  auto nbrs = neighbors_with_self(g.adj);

  for (double eps : {0.0, 1.0}) {
    store.at("fusion.eps").value(0, 0) = eps;
    Tape t;
    Val x = t.constant(g.features);
    Val zm = encoder::encode_masked(t, store, cfg, nbrs, x);
    Val zae = encoder::encode_ae(t, store, cfg, x);
    Val z = encoder::fuse(t, store, zm, zae);
    const Mat& expect = eps == 0.0 ? zm->value : zae->value;
    CHECK((z->value - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("graph encoder is permutation equivariant") {
  Graph g = testutil::two_block_graph(7, 4, 0.6, 0.2, 0.2, 5);
  EncoderConfig cfg = small_config(4);
  ParamStore store;
  Rng rng(6);
  encoder::init_params(store, cfg, rng);

  // permutation pi: node i of the permuted graph is node perm[i] of g
  std::vector<int> perm(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) perm[static_cast<std::size_t>(i)] = (i * 5 + 3) % g.n;

  Graph gp;
  gp.n = g.n;
  gp.features = Mat(g.n, g.features.cols());
  std::vector<int> inv(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
  for (int i = 0; i < g.n; ++i)
    gp.features.row(i) = g.features.row(perm[static_cast<std::size_t>(i)]);
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : g.adj.entries)
    if (e.row < e.col)
      edges.emplace_back(inv[static_cast<std::size_t>(e.row)],
                         inv[static_cast<std::size_t>(e.col)]);
  gp.adj = adjacency_from_edges(g.n, edges);

  Tape t;
  Mat z1 = encoder::encode_masked(t, store, cfg, neighbors_with_self(g.adj),
                                  t.constant(g.features))->value;
  Mat z2 = encoder::encode_masked(t, store, cfg, neighbors_with_self(gp.adj),
                                  t.constant(gp.features))->value;
  for (int i = 0; i < g.n; ++i)
    CHECK((z2.row(i) - z1.row(perm[static_cast<std::size_t>(i)])).cwiseAbs().maxCoeff()
          <= 1e-9);
}

TEST_CASE("attention output is a convex combination of neighbor values") {
  // single head, identical per-node values in some column stay identical
  const int n = 6;
  SparseAdj a = adjacency_from_edges(n, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {0, 3}});
  auto nbrs = neighbors_with_self(a);
  Rng rng(7);
  Tape t;
  Mat wh = randn(n, 3, rng);
  Val out = gat_attention(t, nbrs, t.constant(wh), t.constant(randn(1, 3, rng)),
                          t.constant(randn(1, 3, rng)), 1, 0.2, false);
  for (int i = 0; i < n; ++i) {
    for (Index c = 0; c < 3; ++c) {
      double lo = wh(i, c), hi = wh(i, c);
      for (int p = nbrs.offsets[static_cast<std::size_t>(i)];
           p < nbrs.offsets[static_cast<std::size_t>(i) + 1]; ++p) {
        lo = std::min(lo, wh(nbrs.cols[static_cast<std::size_t>(p)], c));
        hi = std::max(hi, wh(nbrs.cols[static_cast<std::size_t>(p)], c));
      }
      CHECK(out->value(i, c) >= lo - 1e-12);
      CHECK(out->value(i, c) <= hi + 1e-12);
    }
  }
}

TEST_CASE("gradients flow through the full encoder stack") {
  Graph g = testutil::two_block_graph(5, 3, 0.6, 0.2, 0.3, 8);
  EncoderConfig cfg;
  cfg.d_in = 3;
  cfg.embed_dim = 4;
  cfg.hidden_heads = 2;
  cfg.head_dim = 3;
  cfg.ae_hidden = {6, 5};
  ParamStore store;
  Rng rng(9);
  encoder::init_params(store, cfg, rng);
  auto nbrs = neighbors_with_self(g.adj);
  const Mat w = randn(g.n, cfg.embed_dim, rng);

  auto f = [&](Tape& t) {
    Val x = t.constant(g.features);
    Val zm = encoder::encode_masked(t, store, cfg, nbrs, x);
    Val zae = encoder::encode_ae(t, store, cfg, x);
    Val z = encoder::fuse(t, store, zm, zae);
    return testutil::weighted_scalar(t, z, w);
  };
  const double err = testutil::check_gradients(
      store,
      {"gat1.W", "gat1.a_src", "gat1.a_dst", "gat2.W", "ae.enc.W0", "ae.enc.b1",
       "fusion.eps"},
      f);
  CHECK(err < 1e-4);
}
