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

#include "gcma/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gcma/errors.hpp"

namespace gcma::metrics {

namespace {

// remap arbitrary label values to 0..k-1
std::vector<int> compact(const std::vector<int>& labels, int* k_out) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [l, id] : ids) id = next++;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids[labels[i]];
  *k_out = next;
  return out;
}

std::vector<std::vector<long>> contingency(const std::vector<int>& a, int ka,
                                           const std::vector<int>& b, int kb) {
  std::vector<std::vector<long>> c(static_cast<std::size_t>(ka),
                                   std::vector<long>(static_cast<std::size_t>(kb), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    c[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])]++;
  return c;
}

void check_pair(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw DimensionError("metrics: label vectors differ in length");
  if (pred.empty()) throw ParameterError("metrics: empty label vectors");
}

double entropy(const std::vector<long>& counts, double n) {
  double h = 0.0;
  for (long c : counts)
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
  return h;
}

inline double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost[static_cast<std::size_t>(i0) - 1][static_cast<std::size_t>(j) - 1] -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> match(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] > 0)
      match[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
  return match;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_pair(pred, truth);
  int kp = 0, kt = 0;
  auto a = compact(pred, &kp);
  auto b = compact(truth, &kt);
  const int k = std::max(kp, kt);
  auto table = contingency(a, kp, b, kt);
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(k),
                                        std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int i = 0; i < kp; ++i)
    for (int j = 0; j < kt; ++j)
      cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          -static_cast<double>(table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  auto match = hungarian(cost);
  long hits = 0;
  for (int i = 0; i < kp; ++i) {
    const int j = match[static_cast<std::size_t>(i)];
    if (j >= 0 && j < kt)
      hits += table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_pair(pred, truth);
  int kp = 0, kt = 0;
  auto a = compact(pred, &kp);
  auto b = compact(truth, &kt);
  const double n = static_cast<double>(pred.size());
  auto table = contingency(a, kp, b, kt);
  std::vector<long> ra(static_cast<std::size_t>(kp), 0), rb(static_cast<std::size_t>(kt), 0);
  for (int i = 0; i < kp; ++i)
    for (int j = 0; j < kt; ++j) {
      ra[static_cast<std::size_t>(i)] += table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      rb[static_cast<std::size_t>(j)] += table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  const double ha = entropy(ra, n);
  const double hb = entropy(rb, n);
  if (ha == 0.0 && hb == 0.0) return 1.0;  // both trivial partitions: identical
  if (ha == 0.0 || hb == 0.0) return 0.0;
  double mi = 0.0;
  for (int i = 0; i < kp; ++i)
    for (int j = 0; j < kt; ++j) {
      const long c = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (c == 0) continue;
      const double pij = static_cast<double>(c) / n;
      mi += pij * std::log(pij * n * n /
                           (static_cast<double>(ra[static_cast<std::size_t>(i)]) *
                            static_cast<double>(rb[static_cast<std::size_t>(j)])));
    }
  return mi / ((ha + hb) / 2.0);
}

double ari(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_pair(pred, truth);
  int kp = 0, kt = 0;
  auto a = compact(pred, &kp);
  auto b = compact(truth, &kt);
  const double n = static_cast<double>(pred.size());
  auto table = contingency(a, kp, b, kt);
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  std::vector<long> ra(static_cast<std::size_t>(kp), 0), rb(static_cast<std::size_t>(kt), 0);
  for (int i = 0; i < kp; ++i)
    for (int j = 0; j < kt; ++j) {
      const long c = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      sum_ij += choose2(static_cast<double>(c));
      ra[static_cast<std::size_t>(i)] += c;
      rb[static_cast<std::size_t>(j)] += c;
    }
  for (long c : ra) sum_a += choose2(static_cast<double>(c));
  for (long c : rb) sum_b += choose2(static_cast<double>(c));
  const double expected = sum_a * sum_b / choose2(n);
  const double maxidx = (sum_a + sum_b) / 2.0;
  // both partitions trivial in the same way (all-singleton or one cluster)
  if (maxidx == expected) return sum_ij == expected ? 1.0 : 0.0;
  return (sum_ij - expected) / (maxidx - expected);
}

EvalResult evaluate(const std::vector<int>& pred, const std::vector<int>& truth,
                    int k_pred, int k_true) {
  EvalResult r;
  r.acc = accuracy(pred, truth);
  r.nmi = nmi(pred, truth);
  r.ari = ari(pred, truth);
  r.k_pred = k_pred;
  r.k_true = k_true;
  return r;
}

KProtocolResult k_protocol(const std::function<int(std::uint64_t)>& runner,
                           const std::vector<std::uint64_t>& seeds, int k_true) {
  KProtocolResult r;
  double sum = 0.0;
  int ok = 0;
  for (std::uint64_t s : seeds) {
    int k = -1;
    try {
      k = runner(s);
    } catch (const std::exception&) {
      r.failures++;
    }
    r.runs.push_back(k);
    if (k >= 0) {
      sum += k;
      ok++;
      if (k == k_true) r.hits++;
    }
  }
  if (ok > 0) {
    r.mean = sum / ok;
    double var = 0.0;
    for (int k : r.runs)
      if (k >= 0) var += (k - r.mean) * (k - r.mean);
    r.stddev = std::sqrt(var / ok);
  }
  return r;
}

}  // namespace gcma::metrics
