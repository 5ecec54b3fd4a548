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

#include "gcma/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gcma/errors.hpp"
#include "gcma/rng.hpp"

namespace gcma {

void SparseAdj::validate() const {
  int prev_r = -1, prev_c = -1;
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
      throw DimensionError("SparseAdj: entry out of range");
    if (!std::isfinite(e.w)) throw NumericDomainError("SparseAdj: non-finite weight");
    if (e.row < prev_r || (e.row == prev_r && e.col <= prev_c))
      throw UsageError("SparseAdj: entries not row-sorted or duplicated");
    prev_r = e.row;
    prev_c = e.col;
  }
}

SparseAdj::Csr SparseAdj::to_csr() const {
  Csr csr;
  csr.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& e : entries) csr.offsets[static_cast<std::size_t>(e.row) + 1]++;
  for (int i = 0; i < n; ++i) csr.offsets[i + 1] += csr.offsets[i];
  csr.cols.resize(entries.size());
  csr.w.resize(entries.size());
  std::vector<int> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
  for (const auto& e : entries) {
    int pos = cursor[e.row]++;
    csr.cols[pos] = e.col;
    csr.w[pos] = e.w;
  }
  return csr;
}

SparseAdj normalize_adjacency(const SparseAdj& adj) {
  Vec deg = Vec::Ones(adj.n);  // self-loop contributes 1
  for (const auto& e : adj.entries) deg(e.row) += e.w;
  Vec dinv = deg.array().rsqrt();

  SparseAdj out;
  out.n = adj.n;
  out.entries.reserve(adj.entries.size() + static_cast<std::size_t>(adj.n));
  std::size_t pos = 0;
  for (int i = 0; i < adj.n; ++i) {
    bool self_done = false;
    while (pos < adj.entries.size() && adj.entries[pos].row == i) {
      const auto& e = adj.entries[pos];
      if (!self_done && e.col >= i) {
        out.entries.push_back({i, i, dinv(i) * dinv(i)});
        self_done = true;
        if (e.col == i) {  // shouldn't happen (no stored self-loops), skip
          ++pos;
          continue;
        }
      }
      out.entries.push_back({e.row, e.col, e.w * dinv(e.row) * dinv(e.col)});
      ++pos;
    }
    if (!self_done) out.entries.push_back({i, i, dinv(i) * dinv(i)});
  }
  return out;
}

MaskPair sample_masks(const Graph& graph, double p_edge, double p_feat,
                      std::uint64_t seed) {
  if (p_edge < 0.0 || p_edge > 1.0 || p_feat < 0.0 || p_feat > 1.0)
    throw ParameterError("sample_masks: rates must be in [0,1]");
  MaskPair mp;
  mp.p_edge = p_edge;
  mp.p_feat = p_feat;
  mp.seed = seed;
  mp.edge_mask.assign(graph.adj.entries.size(), 1);
  mp.feature_mask.assign(static_cast<std::size_t>(graph.n), 1);

  Rng rng(seed);
  // Draw once per undirected edge (row < col), mirror to the twin entry.
  std::map<std::pair<int, int>, std::uint8_t> drawn;
  for (std::size_t idx = 0; idx < graph.adj.entries.size(); ++idx) {
    const auto& e = graph.adj.entries[idx];
    const auto key = std::minmax(e.row, e.col);
    auto it = drawn.find({key.first, key.second});
    std::uint8_t keep;
    if (it == drawn.end()) {
      keep = rng.bernoulli(p_edge) ? 0 : 1;
      drawn[{key.first, key.second}] = keep;
    } else {
      keep = it->second;
    }
    mp.edge_mask[idx] = keep;
  }
  for (int i = 0; i < graph.n; ++i)
    mp.feature_mask[static_cast<std::size_t>(i)] = rng.bernoulli(p_feat) ? 0 : 1;
  return mp;
}

MaskedGraph apply_mask(const Graph& graph, const MaskPair& masks) {
  if (masks.edge_mask.size() != graph.adj.entries.size() ||
      masks.feature_mask.size() != static_cast<std::size_t>(graph.n))
    throw DimensionError("apply_mask: mask dimensions do not match graph");

  MaskedGraph mg;
  mg.adj_masked.n = graph.n;
  std::set<int> touched;
  for (std::size_t idx = 0; idx < graph.adj.entries.size(); ++idx) {
    const auto& e = graph.adj.entries[idx];
    if (masks.edge_mask[idx]) {
      mg.adj_masked.entries.push_back(e);
    } else {
      touched.insert(e.row);
      touched.insert(e.col);
    }
  }
  mg.features_masked = graph.features;
  for (int i = 0; i < graph.n; ++i) {
    if (!masks.feature_mask[static_cast<std::size_t>(i)]) {
      mg.features_masked.row(i).setZero();
      touched.insert(i);
    }
  }
  mg.masked_nodes.assign(touched.begin(), touched.end());
  return mg;
}

SparseAdj adjacency_from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                               const std::vector<double>* weights) {
  std::map<std::pair<int, int>, double> uniq;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [a, b] = edges[i];
    if (a == b) continue;
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw DimensionError("adjacency_from_edges: endpoint out of range");
    const double w = weights ? (*weights)[i] : 1.0;
    auto upd = [&](int r, int c) {
      auto it = uniq.find({r, c});
      if (it == uniq.end())
        uniq[{r, c}] = w;
      else
        it->second = std::max(it->second, w);
    };
    upd(a, b);
    upd(b, a);
  }
  SparseAdj adj;
  adj.n = n;
  adj.entries.reserve(uniq.size());
  for (const auto& [rc, w] : uniq) adj.entries.push_back({rc.first, rc.second, w});
  return adj;
}

}  // namespace gcma
