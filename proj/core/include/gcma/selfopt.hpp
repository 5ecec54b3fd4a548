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

#ifndef GCMA_SELFOPT_HPP
#define GCMA_SELFOPT_HPP

#include "gcma/ops.hpp"

namespace gcma::selfopt {

/// Row-stochastic Student-t soft assignment of embeddings to centers
/// (default degrees of freedom v = 1).
Val soft_assign(Tape& t, Val z, Val centers, double v = 1.0);

/// Plain-value variant for evaluation paths.
Mat soft_assign_value(const Mat& z, const Mat& centers, double v = 1.0);

/// Sharpened, frequency-normalized target distribution computed on a
/// detached Q; no gradient flows through P.
Mat target_distribution(const Mat& q);

/// KL(P || Q) with constant P; gradient reaches Q's inputs only.
Val kl_loss(Tape& t, const Mat& p, Val q);

double kl_value(const Mat& p, const Mat& q);

/// (Re)initialize the "selfopt.mu" parameter from the embedding rows of
/// the given center nodes; replaces any previous centers.
void reset_centers(ParamStore& store, const Mat& embedding,
                   const std::vector<int>& center_nodes);

}  // namespace gcma::selfopt

#endif  // GCMA_SELFOPT_HPP
