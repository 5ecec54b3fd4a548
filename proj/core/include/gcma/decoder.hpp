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

#ifndef GCMA_DECODER_HPP
#define GCMA_DECODER_HPP

#include <vector>

#include "gcma/graph.hpp"
#include "gcma/ops.hpp"

namespace gcma {

struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  double xi = 0.2;  // temperature
};

namespace decoder {

/// Registers the learnable mask token and the three projection heads:
/// P1, P2: d -> 128 -> d; P3: d -> 128 -> 2d (concatenated target width).
void init_params(ParamStore& store, int embed_dim, Rng& rng);

/// exp(cos(p_out, target) / xi); norms guarded by +1e-12.
double pair_score(const Vec& p_out, const Vec& target, double xi);

/// Rows in masked_nodes replaced by the shared learnable token.
Val remask(Tape& t, ParamStore& store, Val z, const std::vector<int>& masked_nodes);

/// Contrastive multi-target reconstruction loss: per head, an InfoNCE
/// objective over the masked nodes with in-set negatives,
///   -mean_i log [ score(P(v_i), s_i) / sum_j score(P(v_i), s_j) ],
/// weighted by lambda_1..3. The third head scores against [s1 (+) s2].
Val info_loss(Tape& t, ParamStore& store, Val v_hat, const Mat& s1, const Mat& s2,
              const LossWeights& w, const std::vector<int>& masked_nodes);

/// Mean squared reconstruction error against the raw features.
Val ae_recon_loss(Tape& t, Val decoder_output, const Mat& features);

/// Structural target: inner-product GAE trained during pretraining to
/// reconstruct the adjacency, frozen afterwards.
struct GaeConfig {
  int d_in = 0;
  int hidden = 256;
  int embed_dim = 64;
};

void gae_init_params(ParamStore& store, const GaeConfig& cfg, Rng& rng);
Val gae_embed(Tape& t, ParamStore& store, const GaeConfig& cfg,
              const SparseAdj& adj_norm, Val x);
Val gae_loss(Tape& t, ParamStore& store, const GaeConfig& cfg,
             const SparseAdj& adj_norm, const SparseAdj& adj_raw, Val x);

/// Frozen forward pass producing S_1.
Mat structural_target(ParamStore& store, const GaeConfig& cfg,
                      const SparseAdj& adj_norm, const Mat& x);

double adjacency_pos_weight(const SparseAdj& adj);

}  // namespace decoder

}  // namespace gcma

#endif  // GCMA_DECODER_HPP
