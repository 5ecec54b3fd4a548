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

#include "gcma/gat.hpp"

#include <cmath>
#include <set>

#include "gcma/errors.hpp"

namespace gcma {

SparseAdj::Csr neighbors_with_self(const SparseAdj& adj) {
  std::vector<std::set<int>> nbr(static_cast<std::size_t>(adj.n));
  for (int i = 0; i < adj.n; ++i) nbr[static_cast<std::size_t>(i)].insert(i);
  for (const auto& e : adj.entries) nbr[static_cast<std::size_t>(e.row)].insert(e.col);
  SparseAdj::Csr csr;
  csr.offsets.assign(static_cast<std::size_t>(adj.n) + 1, 0);
  for (int i = 0; i < adj.n; ++i)
    csr.offsets[static_cast<std::size_t>(i) + 1] =
        csr.offsets[static_cast<std::size_t>(i)] +
        static_cast<int>(nbr[static_cast<std::size_t>(i)].size());
  csr.cols.reserve(static_cast<std::size_t>(csr.offsets.back()));
  for (int i = 0; i < adj.n; ++i)
    for (int j : nbr[static_cast<std::size_t>(i)]) csr.cols.push_back(j);
  return csr;
}

Val gat_attention(Tape& t, const SparseAdj::Csr& nbrs, Val wh, Val a_src, Val a_dst,
                  int heads, double slope, bool average_heads) {
  const Index n = wh->value.rows();
  if (static_cast<std::size_t>(n) + 1 != nbrs.offsets.size())
    throw DimensionError("gat_attention: neighbor structure does not match rows");
  if (wh->value.cols() % heads != 0)
    throw DimensionError("gat_attention: cols(wh) must be divisible by heads");
  const Index dh = wh->value.cols() / heads;
  if (a_src->value.size() != heads * dh || a_dst->value.size() != heads * dh)
    throw DimensionError("gat_attention: attention vector size mismatch");

  const std::size_t num_edges = nbrs.cols.size();
  // saved for backward: per (edge, head) softmax weight and score sign
  auto alpha = std::make_shared<std::vector<double>>(num_edges * static_cast<std::size_t>(heads));
  auto pre = std::make_shared<std::vector<double>>(num_edges * static_cast<std::size_t>(heads));

  Mat out = Mat::Zero(n, average_heads ? dh : heads * dh);
  for (int h = 0; h < heads; ++h) {
    const auto whh = wh->value.middleCols(h * dh, dh);
    const Vec as = a_src->value.reshaped().segment(h * dh, dh);
    const Vec ad = a_dst->value.reshaped().segment(h * dh, dh);
    const Vec u = whh * as;
    const Vec w = whh * ad;
    for (Index i = 0; i < n; ++i) {
      const int b = nbrs.offsets[static_cast<std::size_t>(i)];
      const int e = nbrs.offsets[static_cast<std::size_t>(i) + 1];
      double mx = -std::numeric_limits<double>::infinity();
      for (int p = b; p < e; ++p) {
        const double raw = u(i) + w(nbrs.cols[static_cast<std::size_t>(p)]);
        const double act = raw > 0.0 ? raw : slope * raw;
        (*pre)[static_cast<std::size_t>(p) * heads + h] = raw;
        (*alpha)[static_cast<std::size_t>(p) * heads + h] = act;
        mx = std::max(mx, act);
      }
      double sum = 0.0;
      for (int p = b; p < e; ++p) {
        double& a = (*alpha)[static_cast<std::size_t>(p) * heads + h];
        a = std::exp(a - mx);
        sum += a;
      }
      for (int p = b; p < e; ++p) {
        double& a = (*alpha)[static_cast<std::size_t>(p) * heads + h];
        a /= sum;
        const int j = nbrs.cols[static_cast<std::size_t>(p)];
        if (average_heads)
          out.row(i) += (a / heads) * whh.row(j);
        else
          out.row(i).segment(h * dh, dh) += a * whh.row(j);
      }
    }
  }

  Val y = t.make(std::move(out),
                 wh->needs_grad || a_src->needs_grad || a_dst->needs_grad);
  if (!y->needs_grad) return y;

  const SparseAdj::Csr* nb = &nbrs;
  y->pull = [wh, a_src, a_dst, nb, heads, dh, n, slope, average_heads, alpha,
             pre](Node& node) {
    Mat gwh = Mat::Zero(n, heads * dh);
    Vec gas = Vec::Zero(heads * dh);
    Vec gad = Vec::Zero(heads * dh);
    std::vector<double> dpre(nb->cols.size());
    for (int h = 0; h < heads; ++h) {
      const auto whh = wh->value.middleCols(h * dh, dh);
      const Vec as = a_src->value.reshaped().segment(h * dh, dh);
      const Vec ad = a_dst->value.reshaped().segment(h * dh, dh);
      Vec du = Vec::Zero(n);
      Vec dw = Vec::Zero(n);
      for (Index i = 0; i < n; ++i) {
        const int b = nb->offsets[static_cast<std::size_t>(i)];
        const int e = nb->offsets[static_cast<std::size_t>(i) + 1];
        Eigen::RowVectorXd gi =
            average_heads ? Eigen::RowVectorXd(node.grad.row(i) / heads)
                          : Eigen::RowVectorXd(node.grad.row(i).segment(h * dh, dh));
        double wsum = 0.0;
        for (int p = b; p < e; ++p) {
          const int j = nb->cols[static_cast<std::size_t>(p)];
          const double a = (*alpha)[static_cast<std::size_t>(p) * heads + h];
          const double dalpha = gi.dot(whh.row(j));
          gwh.row(j).segment(h * dh, dh) += a * gi;
          dpre[static_cast<std::size_t>(p)] = dalpha;  // temp: store dalpha
          wsum += a * dalpha;
        }
        for (int p = b; p < e; ++p) {
          const int j = nb->cols[static_cast<std::size_t>(p)];
          const double a = (*alpha)[static_cast<std::size_t>(p) * heads + h];
          const double de = a * (dpre[static_cast<std::size_t>(p)] - wsum);
          const double raw = (*pre)[static_cast<std::size_t>(p) * heads + h];
          const double d = de * (raw > 0.0 ? 1.0 : slope);
          du(i) += d;
          dw(j) += d;
        }
      }
      gwh.middleCols(h * dh, dh).noalias() += du * as.transpose();
      gwh.middleCols(h * dh, dh).noalias() += dw * ad.transpose();
      gas.segment(h * dh, dh).noalias() += whh.transpose() * du;
      gad.segment(h * dh, dh).noalias() += whh.transpose() * dw;
    }
    if (wh->needs_grad) wh->g() += gwh;
    if (a_src->needs_grad) a_src->g().reshaped() += gas;
    if (a_dst->needs_grad) a_dst->g().reshaped() += gad;
  };
  return y;
}

void gat_layer_init(ParamStore& store, const std::string& prefix,
                    const GatLayerConfig& cfg, Rng& rng) {
  Param& w = store.add(prefix + ".W", cfg.in_dim, cfg.heads * cfg.out_dim);
  glorot_init(w.value, rng);
  Param& as = store.add(prefix + ".a_src", cfg.heads * cfg.out_dim, 1);
  glorot_init(as.value, rng);
  Param& ad = store.add(prefix + ".a_dst", cfg.heads * cfg.out_dim, 1);
  glorot_init(ad.value, rng);
}

Val gat_layer_forward(Tape& t, ParamStore& store, const std::string& prefix,
                      const GatLayerConfig& cfg, const SparseAdj::Csr& nbrs, Val h) {
  Val w = leaf(t, store.at(prefix + ".W"));
  Val as = leaf(t, store.at(prefix + ".a_src"));
  Val ad = leaf(t, store.at(prefix + ".a_dst"));
  Val wh = matmul(t, h, w);
  return gat_attention(t, nbrs, wh, as, ad, cfg.heads, cfg.negative_slope,
                       cfg.average_heads);
}

}  // namespace gcma
