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

#ifndef GCMA_TENSOR_HPP
#define GCMA_TENSOR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gcma/errors.hpp"

namespace gcma {

// All numerics are 64-bit; graphs at desk scale fit densely and
// finite-difference checks need the precision.
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sparse symmetric adjacency stored as a row-sorted COO list.
struct SparseAdj {
  struct Entry {
    int row;
    int col;
    double w;
  };

  int n = 0;
  std::vector<Entry> entries;  // sorted by (row, col), no duplicates

  Index nnz() const { return static_cast<Index>(entries.size()); }

  Mat to_dense() const {
    Mat d = Mat::Zero(n, n);
    for (const auto& e : entries) d(e.row, e.col) = e.w;
    return d;
  }

  void validate() const;

  /// Neighbor lists (CSR offsets into a column-index array).
  struct Csr {
    std::vector<int> offsets;  // size n+1
    std::vector<int> cols;
    std::vector<double> w;
  };
  Csr to_csr() const;
};

inline void check_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw NumericDomainError(std::string(what) + ": non-finite values");
}

}  // namespace gcma

#endif  // GCMA_TENSOR_HPP
