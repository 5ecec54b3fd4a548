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

#include <benchmark/benchmark.h>

#include "gcma/dpeaks.hpp"
#include "gcma/gat.hpp"
#include "gcma/graph.hpp"
#include "gcma/ops.hpp"
#include "gcma/rng.hpp"

using namespace gcma;

namespace {

Mat random_mat(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

SparseAdj random_graph(int n, int avg_degree, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  const double p = static_cast<double>(avg_degree) / n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
  return adjacency_from_edges(n, edges);
}

void BM_matmul_forward_backward(benchmark::State& state) {
  const Index n = state.range(0);
  ParamStore store;
  store.add("A", n, n).value = random_mat(n, n, 1);
  store.add("B", n, n).value = random_mat(n, n, 2);
  for (auto _ : state) {
    Tape t;
    Val y = sum_all(t, matmul(t, leaf(t, store.at("A")), leaf(t, store.at("B"))));
    t.backward(y);
    store.zero_grad();
  }
}

void BM_spmm_forward_backward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SparseAdj a = random_graph(n, 8, 3);
  ParamStore store;
  store.add("X", n, 64).value = random_mat(n, 64, 4);
  for (auto _ : state) {
    Tape t;
    Val y = sum_all(t, spmm(t, a, leaf(t, store.at("X"))));
    t.backward(y);
    store.zero_grad();
  }
}

void BM_gat_attention(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SparseAdj a = random_graph(n, 8, 5);
  auto nbrs = neighbors_with_self(a);
  const int heads = 4, dim = 16;
  ParamStore store;
  store.add("WH", n, heads * dim).value = random_mat(n, heads * dim, 6);
  store.add("as", 1, heads * dim).value = random_mat(1, heads * dim, 7);
  store.add("ad", 1, heads * dim).value = random_mat(1, heads * dim, 8);
  for (auto _ : state) {
    Tape t;
    Val y = gat_attention(t, nbrs, leaf(t, store.at("WH")), leaf(t, store.at("as")),
                          leaf(t, store.at("ad")), heads, 0.2, false);
    t.backward(sum_all(t, y));
    store.zero_grad();
  }
}

void BM_dpeaks_estimate_k(benchmark::State& state) {
  const Index n = state.range(0);
  Mat pts = random_mat(n, 64, 9);
  for (auto _ : state) {
    auto est = dpeaks::estimate_k(pts);
    benchmark::DoNotOptimize(est.state.k);
  }
}

void BM_gae_recon_loss(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SparseAdj a = random_graph(n, 8, 10);
  ParamStore store;
  store.add("Z", n, 64).value = random_mat(n, 64, 11);
  for (auto _ : state) {
    Tape t;
    Val y = gae_recon_loss(t, leaf(t, store.at("Z")), a, 10.0);
    t.backward(y);
    store.zero_grad();
  }
}

}  // namespace

BENCHMARK(BM_matmul_forward_backward)->Arg(128)->Arg(512);
BENCHMARK(BM_spmm_forward_backward)->Arg(1000)->Arg(3000);
BENCHMARK(BM_gat_attention)->Arg(1000)->Arg(3000);
BENCHMARK(BM_dpeaks_estimate_k)->Arg(500)->Arg(1500);
BENCHMARK(BM_gae_recon_loss)->Arg(500)->Arg(1500);

BENCHMARK_MAIN();
