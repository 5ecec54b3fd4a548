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

#include "gcma/decoder.hpp"

#include <cmath>

#include "gcma/errors.hpp"

namespace gcma::decoder {

namespace {
constexpr int kProjHidden = 128;

void init_head(ParamStore& store, const std::string& prefix, int in_dim,
               int out_dim, Rng& rng) {
  Param& w0 = store.add(prefix + ".W0", in_dim, kProjHidden);
  glorot_init(w0.value, rng);
  store.add(prefix + ".b0", 1, kProjHidden);
  Param& w1 = store.add(prefix + ".W1", kProjHidden, out_dim);
  glorot_init(w1.value, rng);
  store.add(prefix + ".b1", 1, out_dim);
}

Val head_forward(Tape& t, ParamStore& store, const std::string& prefix, Val x) {
  Val h = add_rowvec(t, matmul(t, x, leaf(t, store.at(prefix + ".W0"))),
                     leaf(t, store.at(prefix + ".b0")));
  h = leaky_relu(t, h, 0.2);
  return add_rowvec(t, matmul(t, h, leaf(t, store.at(prefix + ".W1"))),
                    leaf(t, store.at(prefix + ".b1")));
}

Mat normalized_rows(const Mat& m) {
  Mat out = m;
  for (Index i = 0; i < out.rows(); ++i) out.row(i) /= out.row(i).norm() + 1e-12;
  return out;
}

Val nce_term(Tape& t, ParamStore& store, const std::string& head, Val v_rows,
             const Mat& targets, double xi) {
  Val proj = head_forward(t, store, head, v_rows);
  Val pn = l2_normalize_row(t, proj);
  Val tn = t.constant(normalized_rows(targets).transpose());
  Val logits = scale(t, matmul(t, pn, tn), 1.0 / xi);
  return info_nce(t, logits);
}

}  // namespace

void init_params(ParamStore& store, int embed_dim, Rng& rng) {
  Param& token = store.add("decoder.mask_token", 1, embed_dim);
  // small random init keeps masked-row preactivations off the exact
  // zero-activation kink
  glorot_init(token.value, rng);
  token.value *= 0.1;
  init_head(store, "proj.P1", embed_dim, embed_dim, rng);
  init_head(store, "proj.P2", embed_dim, embed_dim, rng);
  init_head(store, "proj.P3", embed_dim, 2 * embed_dim, rng);
}

double pair_score(const Vec& p_out, const Vec& target, double xi) {
  if (xi <= 0.0) throw ParameterError("pair_score: xi must be positive");
  const double np = p_out.norm() + 1e-12;
  const double nt = target.norm() + 1e-12;
  return std::exp(p_out.dot(target) / (np * nt) / xi);
}

Val remask(Tape& t, ParamStore& store, Val z, const std::vector<int>& masked_nodes) {
  Val token = leaf(t, store.at("decoder.mask_token"));
  return remask_rows(t, z, masked_nodes, token);
}

Val info_loss(Tape& t, ParamStore& store, Val v_hat, const Mat& s1, const Mat& s2,
              const LossWeights& w, const std::vector<int>& masked_nodes) {
  if (masked_nodes.empty())
    throw UsageError("info_loss: undefined for an empty masked-node set");
  if (w.xi <= 0.0) throw ParameterError("info_loss: xi must be positive");

  Val v_rows = select_rows(t, v_hat, masked_nodes);
  Mat s1m(static_cast<Index>(masked_nodes.size()), s1.cols());
  Mat s2m(static_cast<Index>(masked_nodes.size()), s2.cols());
  for (std::size_t i = 0; i < masked_nodes.size(); ++i) {
    s1m.row(static_cast<Index>(i)) = s1.row(masked_nodes[i]);
    s2m.row(static_cast<Index>(i)) = s2.row(masked_nodes[i]);
  }
  Mat s12(s1m.rows(), s1m.cols() + s2m.cols());
  s12 << s1m, s2m;

  Val t1 = nce_term(t, store, "proj.P1", v_rows, s1m, w.xi);
  Val t2 = nce_term(t, store, "proj.P2", v_rows, s2m, w.xi);
  Val t3 = nce_term(t, store, "proj.P3", v_rows, s12, w.xi);
  return weighted_sum(t, {{w.lambda1, t1}, {w.lambda2, t2}, {w.lambda3, t3}});
}

Val ae_recon_loss(Tape& t, Val decoder_output, const Mat& features) {
  return mse_const(t, decoder_output, features);
}

void gae_init_params(ParamStore& store, const GaeConfig& cfg, Rng& rng) {
  Param& w0 = store.add("gae.W0", cfg.d_in, cfg.hidden);
  glorot_init(w0.value, rng);
  Param& w1 = store.add("gae.W1", cfg.hidden, cfg.embed_dim);
  glorot_init(w1.value, rng);
}

Val gae_embed(Tape& t, ParamStore& store, const GaeConfig& cfg,
              const SparseAdj& adj_norm, Val x) {
  Val h = spmm(t, adj_norm, matmul(t, x, leaf(t, store.at("gae.W0"))));
  h = leaky_relu(t, h, 0.2);
  return spmm(t, adj_norm, matmul(t, h, leaf(t, store.at("gae.W1"))));
}

double adjacency_pos_weight(const SparseAdj& adj) {
  const double n2 = static_cast<double>(adj.n) * static_cast<double>(adj.n);
  const double nnz = std::max<double>(1.0, static_cast<double>(adj.nnz()));
  return (n2 - nnz) / nnz;
}

Val gae_loss(Tape& t, ParamStore& store, const GaeConfig& cfg,
             const SparseAdj& adj_norm, const SparseAdj& adj_raw, Val x) {
  Val z = gae_embed(t, store, cfg, adj_norm, x);
  return gae_recon_loss(t, z, adj_raw, adjacency_pos_weight(adj_raw));
}

Mat structural_target(ParamStore& store, const GaeConfig& cfg,
                      const SparseAdj& adj_norm, const Mat& x) {
  Tape t;
  Val xc = t.constant(x);
  Mat out = gae_embed(t, store, cfg, adj_norm, xc)->value;
  return out;
}

}  // namespace gcma::decoder
