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

#ifndef GCMA_HEAT_KERNEL_HPP
#define GCMA_HEAT_KERNEL_HPP

#include "gcma/graph.hpp"

namespace gcma {

/// k-NN affinity graph for non-graph data: each node links to its
/// `neighbors` nearest rows with weight exp(-||x_i - x_j||^2 / t),
/// symmetrized by max(w_ij, w_ji).
SparseAdj build_heat_kernel_graph(const Mat& features, int neighbors, double t);

/// Default bandwidth: mean squared pairwise distance over the first
/// min(n, 1000) rows.
double heat_kernel_default_t(const Mat& features);

}  // namespace gcma

#endif  // GCMA_HEAT_KERNEL_HPP
