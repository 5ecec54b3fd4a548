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

#ifndef GCMA_METRICS_HPP
#define GCMA_METRICS_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace gcma {

struct EvalResult {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  int k_pred = 0;
  int k_true = 0;
};

struct KProtocolResult {
  std::vector<int> runs;  // one predicted k per seed; -1 marks a failed run
  double mean = 0.0;
  double stddev = 0.0;
  int hits = 0;
  int failures = 0;
};

namespace metrics {

/// Hungarian-matched clustering accuracy (contingency table zero-padded
/// to square, so wrong k stays well defined).
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// NMI with arithmetic-mean entropy normalization.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

double ari(const std::vector<int>& pred, const std::vector<int>& truth);

EvalResult evaluate(const std::vector<int>& pred, const std::vector<int>& truth,
                    int k_pred, int k_true);

/// Minimum-cost assignment on a square cost matrix, O(n^3); returns the
/// column matched to each row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

/// Runs `runner(seed)` once per seed and aggregates the predicted k values
/// against k_true. A runner throwing is recorded as a failed run and
/// excluded from the mean.
KProtocolResult k_protocol(const std::function<int(std::uint64_t)>& runner,
                           const std::vector<std::uint64_t>& seeds, int k_true);

}  // namespace metrics

}  // namespace gcma

#endif  // GCMA_METRICS_HPP
