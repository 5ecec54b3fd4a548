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

#include "gcma/selfopt.hpp"

#include <cmath>

#include "gcma/errors.hpp"

namespace gcma::selfopt {

Val soft_assign(Tape& t, Val z, Val centers, double v) {
  if (v <= 0.0) throw ParameterError("soft_assign: v must be positive");
  return student_q(t, z, centers, v);
}

Mat soft_assign_value(const Mat& z, const Mat& centers, double v) {
  Tape t;
  return student_q(t, t.constant(z), t.constant(centers), v)->value;
}

Mat target_distribution(const Mat& q) {
  Vec freq = q.colwise().sum();
  Mat p(q.rows(), q.cols());
  for (Index j = 0; j < q.cols(); ++j)
    p.col(j) = q.col(j).array().square() / freq(j);
  for (Index i = 0; i < p.rows(); ++i) p.row(i) /= p.row(i).sum();
  return p;
}

Val kl_loss(Tape& t, const Mat& p, Val q) { return kl_const_p(t, p, q); }

double kl_value(const Mat& p, const Mat& q) {
  Tape t;
  return kl_const_p(t, p, t.constant(q))->value(0, 0);
}

void reset_centers(ParamStore& store, const Mat& embedding,
                   const std::vector<int>& center_nodes) {
  if (center_nodes.empty()) throw UsageError("reset_centers: no centers");
  if (store.has("selfopt.mu")) store.remove("selfopt.mu");
  Param& mu = store.add("selfopt.mu", static_cast<Index>(center_nodes.size()),
                        embedding.cols());
  for (std::size_t c = 0; c < center_nodes.size(); ++c)
    mu.value.row(static_cast<Index>(c)) = embedding.row(center_nodes[c]);
}

}  // namespace gcma::selfopt
