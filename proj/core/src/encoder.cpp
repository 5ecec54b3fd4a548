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

#include "gcma/encoder.hpp"

namespace gcma::encoder {

namespace {

std::vector<int> ae_encoder_dims(const EncoderConfig& cfg) {
  std::vector<int> dims = {cfg.d_in};
  dims.insert(dims.end(), cfg.ae_hidden.begin(), cfg.ae_hidden.end());
  dims.push_back(cfg.embed_dim);
  return dims;
}

std::vector<int> ae_decoder_dims(const EncoderConfig& cfg) {
  auto dims = ae_encoder_dims(cfg);
  std::reverse(dims.begin(), dims.end());
  return dims;
}

void init_mlp(ParamStore& store, const std::string& prefix,
              const std::vector<int>& dims, Rng& rng) {
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Param& w = store.add(prefix + ".W" + std::to_string(l), dims[l], dims[l + 1]);
    glorot_init(w.value, rng);
    store.add(prefix + ".b" + std::to_string(l), 1, dims[l + 1]);
  }
}

// hidden layers use leaky-relu, the last layer is linear
Val mlp_forward(Tape& t, ParamStore& store, const std::string& prefix,
                std::size_t layers, Val x) {
  Val h = x;
  for (std::size_t l = 0; l < layers; ++l) {
    Val w = leaf(t, store.at(prefix + ".W" + std::to_string(l)));
    Val b = leaf(t, store.at(prefix + ".b" + std::to_string(l)));
    h = add_rowvec(t, matmul(t, h, w), b);
    if (l + 1 < layers) h = leaky_relu(t, h, 0.2);
  }
  return h;
}

}  // namespace

void init_params(ParamStore& store, const EncoderConfig& cfg, Rng& rng) {
  gat_layer_init(store, "gat1", cfg.gat1(), rng);
  gat_layer_init(store, "gat2", cfg.gat2(), rng);
  init_mlp(store, "ae.enc", ae_encoder_dims(cfg), rng);
  init_mlp(store, "ae.dec", ae_decoder_dims(cfg), rng);
  Param& eps = store.add("fusion.eps", 1, 1);
  eps.value(0, 0) = cfg.eps_init;
}

Val encode_masked(Tape& t, ParamStore& store, const EncoderConfig& cfg,
                  const SparseAdj::Csr& nbrs_masked, Val x_masked) {
  Val h = gat_layer_forward(t, store, "gat1", cfg.gat1(), nbrs_masked, x_masked);
  h = leaky_relu(t, h, 0.2);
  return gat_layer_forward(t, store, "gat2", cfg.gat2(), nbrs_masked, h);
}

Val encode_ae(Tape& t, ParamStore& store, const EncoderConfig& cfg, Val x) {
  return mlp_forward(t, store, "ae.enc", ae_encoder_dims(cfg).size() - 1, x);
}

Val decode_ae(Tape& t, ParamStore& store, const EncoderConfig& cfg, Val z_ae) {
  return mlp_forward(t, store, "ae.dec", ae_decoder_dims(cfg).size() - 1, z_ae);
}

Val fuse(Tape& t, ParamStore& store, Val z_m, Val z_ae) {
  Val eps = leaf(t, store.at("fusion.eps"));
  return scalar_mix(t, z_m, z_ae, eps);
}

double current_eps(const ParamStore& store) {
  return store.at("fusion.eps").value(0, 0);
}

}  // namespace gcma::encoder
