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

#ifndef GCMA_GRAPH_HPP
#define GCMA_GRAPH_HPP

#include <cstdint>
#include <vector>

#include "gcma/tensor.hpp"

namespace gcma {

/// Undirected attributed graph. The adjacency is stored symmetric with no
/// self-loops; normalization adds them.
struct Graph {
  int n = 0;
  SparseAdj adj;
  Mat features;             // n x d_in
  std::vector<int> labels;  // empty when ground truth is absent
  int true_k = 0;           // 0 when unknown

  bool has_labels() const { return !labels.empty(); }
};

/// Random binary masks over stored edges and node features.
/// Mask value 0 = masked. Reproducible from (seed, p_edge, p_feat).
struct MaskPair {
  std::vector<std::uint8_t> edge_mask;     // aligned with adj.entries
  std::vector<std::uint8_t> feature_mask;  // length n
  double p_edge = 0.0;
  double p_feat = 0.0;
  std::uint64_t seed = 0;
};

struct MaskedGraph {
  SparseAdj adj_masked;
  Mat features_masked;
  std::vector<int> masked_nodes;  // sorted node set touched by either mask
};

/// D^{-1/2} (A + I) D^{-1/2} with degrees taken from A + I.
/// Isolated nodes end up with a self-loop of weight 1.
SparseAdj normalize_adjacency(const SparseAdj& adj);

/// Independent Bernoulli masks; the two stored directions of an edge are
/// masked jointly. Deterministic under seed.
MaskPair sample_masks(const Graph& graph, double p_edge, double p_feat,
                      std::uint64_t seed);

MaskedGraph apply_mask(const Graph& graph, const MaskPair& masks);

/// Build symmetric adjacency from an undirected edge list, deduplicated,
/// self-loops dropped.
SparseAdj adjacency_from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                               const std::vector<double>* weights = nullptr);

}  // namespace gcma

#endif  // GCMA_GRAPH_HPP
