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

#ifndef GCMA_GAT_HPP
#define GCMA_GAT_HPP

#include <string>

#include "gcma/ops.hpp"

namespace gcma {

struct GatLayerConfig {
  int in_dim = 0;
  int out_dim = 0;  // per head
  int heads = 1;
  double negative_slope = 0.2;
  bool average_heads = false;  // concat on hidden layers, average on output
};

/// Neighbor structure (self-loops added) used by the attention op.
SparseAdj::Csr neighbors_with_self(const SparseAdj& adj);

/// Multi-head attention aggregation over the neighbor lists. wh is the
/// pre-projected n x (heads * out_dim) matrix; a_src/a_dst are the
/// stacked per-head attention vectors of length heads * out_dim.
/// Per neighborhood: e_ij = leaky_relu(a_src . wh_i + a_dst . wh_j),
/// alpha = softmax_j(e_ij), out_i = sum_j alpha_ij wh_j.
Val gat_attention(Tape& t, const SparseAdj::Csr& nbrs, Val wh, Val a_src, Val a_dst,
                  int heads, double slope, bool average_heads);

/// Registers "<prefix>.W", "<prefix>.a_src", "<prefix>.a_dst".
void gat_layer_init(ParamStore& store, const std::string& prefix,
                    const GatLayerConfig& cfg, Rng& rng);

/// Full layer: projection, attention, no output activation.
Val gat_layer_forward(Tape& t, ParamStore& store, const std::string& prefix,
                      const GatLayerConfig& cfg, const SparseAdj::Csr& nbrs, Val h);

}  // namespace gcma

#endif  // GCMA_GAT_HPP
