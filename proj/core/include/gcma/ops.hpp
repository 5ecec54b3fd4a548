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

#ifndef GCMA_OPS_HPP
#define GCMA_OPS_HPP

#include <utility>
#include <vector>

#include "gcma/params.hpp"
#include "gcma/tape.hpp"

namespace gcma {

/// Tape leaf backed by a ParamStore entry; backward accumulates into
/// the parameter's gradient buffer.
Val leaf(Tape& t, Param& p);

Val matmul(Tape& t, Val a, Val b);

/// Sparse-dense product A * X with a constant adjacency.
Val spmm(Tape& t, const SparseAdj& a, Val x);

Val add(Tape& t, Val a, Val b);
Val sub(Tape& t, Val a, Val b);
Val hadamard(Tape& t, Val a, Val b);
Val add_rowvec(Tape& t, Val a, Val bias);  // bias is 1 x cols
Val scale(Tape& t, Val a, double s);

Val leaky_relu(Tape& t, Val a, double slope = 0.01);
Val exp_op(Tape& t, Val a);
Val log_op(Tape& t, Val a);  // requires strictly positive input
Val sigmoid(Tape& t, Val a);
Val softmax_row(Tape& t, Val a);
Val l2_normalize_row(Tape& t, Val a);

enum class EwOp { kLeakyRelu, kExp, kLog, kSoftmaxRow, kL2NormalizeRow };
Val elementwise(Tape& t, EwOp op, Val a);

Val concat_cols(Tape& t, Val a, Val b);
Val select_rows(Tape& t, Val a, const std::vector<int>& idx);

/// Replace the given rows by a shared 1 x d token; other rows pass through.
Val remask_rows(Tape& t, Val a, const std::vector<int>& idx, Val token);

/// (1 - eps) * a + eps * b with a learnable 1x1 eps.
Val scalar_mix(Tape& t, Val a, Val b, Val eps);

Val sum_all(Tape& t, Val a);
Val mean_all(Tape& t, Val a);

/// mean((x - target)^2) over all entries.
Val mse_const(Tape& t, Val x, const Mat& target);

/// InfoNCE over a precomputed m x m logit matrix whose diagonal holds the
/// positive pairs: mean_i [logsumexp_j C_ij - C_ii].
Val info_nce(Tape& t, Val logits);

/// Student-t soft assignment of rows of z to rows of centers (Q matrix).
Val student_q(Tape& t, Val z, Val centers, double v);

/// KL(P || Q) with a constant target P; gradient flows into Q only.
Val kl_const_p(Tape& t, const Mat& p, Val q);

/// Within-cluster sum of squared distances to fixed means; labels and
/// means are constants for the step.
Val cluster_wcss(Tape& t, Val z, const std::vector<int>& labels, const Mat& means);

/// Weighted binary cross-entropy between sigmoid(Z Z^T) and the (binarized)
/// adjacency, averaged over all n^2 pairs. Computed in row blocks.
Val gae_recon_loss(Tape& t, Val z, const SparseAdj& adj, double pos_weight);

/// Scalar combination sum_i w_i * s_i of 1x1 nodes.
Val weighted_sum(Tape& t, const std::vector<std::pair<double, Val>>& terms);

}  // namespace gcma

#endif  // GCMA_OPS_HPP
