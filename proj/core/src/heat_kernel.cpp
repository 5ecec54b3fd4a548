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

#include "gcma/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcma/errors.hpp"

namespace gcma {

SparseAdj build_heat_kernel_graph(const Mat& features, int neighbors, double t) {
  const int n = static_cast<int>(features.rows());
  if (neighbors < 1) throw ParameterError("heat kernel: neighbors must be >= 1");
  if (neighbors >= n) throw ParameterError("heat kernel: neighbors must be < n");
  if (t <= 0.0) throw ParameterError("heat kernel: t must be positive");

  std::vector<std::pair<int, int>> edges;
  std::vector<double> weights;
  std::vector<int> order(static_cast<std::size_t>(n));
  Vec d2(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      d2(j) = (features.row(i) - features.row(j)).squaredNorm();
    d2(i) = std::numeric_limits<double>::infinity();
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + neighbors, order.end(),
                      [&](int a, int b) {
                        return d2(a) != d2(b) ? d2(a) < d2(b) : a < b;
                      });
    for (int r = 0; r < neighbors; ++r) {
      const int j = order[static_cast<std::size_t>(r)];
      edges.push_back({i, j});
      weights.push_back(std::exp(-d2(j) / t));
    }
  }
  // adjacency_from_edges keeps max(w_ij, w_ji) for duplicate pairs
  return adjacency_from_edges(n, edges, &weights);
}

double heat_kernel_default_t(const Mat& features) {
  const Index m = std::min<Index>(features.rows(), 1000);
  double total = 0.0;
  long count = 0;
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j) {
      total += (features.row(i) - features.row(j)).squaredNorm();
      ++count;
    }
  if (count == 0) return 1.0;
  return total / static_cast<double>(count);
}

}  // namespace gcma
