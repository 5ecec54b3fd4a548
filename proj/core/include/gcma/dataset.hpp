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

#ifndef GCMA_DATASET_HPP
#define GCMA_DATASET_HPP

#include <cstdint>
#include <string>

#include "gcma/graph.hpp"

namespace gcma {

/// Planetoid text format:
///   .content lines: "<id> <f_1> ... <f_d> <label>"
///   .cites lines:   "<id> <id>"
/// Citation edges with unknown endpoint ids are dropped; the count of
/// dropped edges is returned through *dropped_edges when non-null.
Graph load_planetoid(const std::string& content_path, const std::string& cites_path,
                     int* dropped_edges = nullptr);

/// Canonical on-disk dataset directory:
///   header.json   {"n":, "d_in":, "true_k":, "content_hash": "<hex>"}
///   features.csv  n rows, d_in comma-separated values
///   edges.csv     "src,dst,weight" per stored (directed) entry
///   labels.csv    one integer per line (absent when no ground truth)
void write_dataset(const std::string& dir, const Graph& graph);
Graph read_dataset(const std::string& dir);

/// FNV-1a content hash over the canonical files, as written in header.json.
std::uint64_t dataset_content_hash(const Graph& graph);

}  // namespace gcma

#endif  // GCMA_DATASET_HPP
