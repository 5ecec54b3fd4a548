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

#ifndef GCMA_ENCODER_HPP
#define GCMA_ENCODER_HPP

#include <string>
#include <vector>

#include "gcma/gat.hpp"
#include "gcma/graph.hpp"

namespace gcma {

/// Masking fusion encoder: a 2-layer GAT on the masked graph, a
/// feed-forward AE on the raw features, and a learnable linear blend
/// Z = (1 - eps) Z_m + eps Z_ae with eps initialized to 0.1.
struct EncoderConfig {
  int d_in = 0;
  int embed_dim = 64;
  int hidden_heads = 4;
  int head_dim = 64;                  // hidden GAT output per head
  std::vector<int> ae_hidden = {512, 256};
  double eps_init = 0.1;

  GatLayerConfig gat1() const {
    return {d_in, head_dim, hidden_heads, 0.2, false};
  }
  GatLayerConfig gat2() const {
    return {hidden_heads * head_dim, embed_dim, 1, 0.2, true};
  }
};

namespace encoder {

/// Registers every encoder parameter (GAT stack, AE encoder+decoder, eps).
void init_params(ParamStore& store, const EncoderConfig& cfg, Rng& rng);

/// Z_m: n x embed_dim from the 2-layer GAT on the masked, renormalized graph.
Val encode_masked(Tape& t, ParamStore& store, const EncoderConfig& cfg,
                  const SparseAdj::Csr& nbrs_masked, Val x_masked);

/// Z_ae: n x embed_dim from the AE encoder stack on raw features.
Val encode_ae(Tape& t, ParamStore& store, const EncoderConfig& cfg, Val x);

/// AE decoder: embed_dim back to d_in (reconstruction for L_a).
Val decode_ae(Tape& t, ParamStore& store, const EncoderConfig& cfg, Val z_ae);

/// Z = (1 - eps) Z_m + eps Z_ae with the stored learnable eps.
Val fuse(Tape& t, ParamStore& store, Val z_m, Val z_ae);

double current_eps(const ParamStore& store);

}  // namespace encoder

}  // namespace gcma

#endif  // GCMA_ENCODER_HPP
