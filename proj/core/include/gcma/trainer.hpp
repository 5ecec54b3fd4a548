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

#ifndef GCMA_TRAINER_HPP
#define GCMA_TRAINER_HPP

#include <optional>
#include <string>

#include "gcma/decoder.hpp"
#include "gcma/dpeaks.hpp"
#include "gcma/encoder.hpp"
#include "gcma/graph.hpp"
#include "gcma/metrics.hpp"

namespace gcma {

struct TrainConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double lambda_1 = 1.0;
  double lambda_2 = 1.0;
  double lambda_3 = 1.0;
  double xi = 0.2;
  double p_edge = 0.5;
  double p_feat = 0.5;
  int pretrain_epochs = 15;
  int joint_epochs = 30;
  int max_iters = 1000;
  double lr_pretrain = 1e-3;
  double lr_finetune = 1e-4;
  int embed_dim = 64;
  double eps_init = 0.1;    // initial fusion weight
  bool freeze_eps = false;  // pin the fusion weight at eps_init (ablations)
  int p_refresh = 5;
  int dpeaks_refresh = 5;  // <= 0 disables the density-peaks decoder
  double v = 1.0;          // Student-t degrees of freedom
  int k_max = 64;
  std::vector<double> dc_grid = {1.0, 1.5, 2.0, 2.5, 3.0};
  double conv_tol = 1e-5;
  int conv_patience = 10;
  std::uint64_t seed = 0;

  /// Flat "key = value" file; '#' starts a comment; unknown keys are hard
  /// errors (a silently ignored typo corrupts sweeps).
  static TrainConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  void validate() const;

  LossWeights loss_weights() const { return {lambda_1, lambda_2, lambda_3, xi}; }
};

struct EpochLog {
  int epoch = 0;
  double lp = 0.0;
  double la = 0.0;
  double lc = 0.0;
  double ls = 0.0;
  double total = 0.0;
  double eps = 0.0;
  int k = 0;
};

struct TrainReport {
  std::vector<EpochLog> pretrain_log;
  std::vector<EpochLog> joint_log;
  ClusterState final_state;
  int final_k = 0;
  Mat embedding;  // final fused Z on the unmasked graph
  bool converged = false;
  double wall_clock_sec = 0.0;  // kept out of the serialized report

  /// Deterministic JSON (config + logs + clustering); wall clock excluded
  /// so identical runs serialize byte-identically.
  std::string to_json(const TrainConfig& config) const;
  void write_epoch_csv(const std::string& path) const;
};

/// Orchestrates pretraining and joint training on one graph.
class Trainer {
 public:
  Trainer(const Graph& graph, const TrainConfig& config);

  void pretrain();
  TrainReport train_joint();
  TrainReport run();  // pretrain + joint

  ParamStore& params() { return store_; }
  const TrainConfig& config() const { return cfg_; }

  /// Fused embedding of the unmasked graph under current parameters.
  Mat infer_embedding();

 private:
  EpochLog pretrain_epoch(int epoch);
  EpochLog joint_epoch(int epoch);

  const Graph& graph_;
  TrainConfig cfg_;
  EncoderConfig enc_cfg_;
  decoder::GaeConfig gae_cfg_;
  ParamStore store_;
  SparseAdj adj_norm_full_;
  SparseAdj::Csr nbrs_full_;
  Mat s1_;  // frozen structural target after pretraining
  bool pretrained_ = false;
  std::optional<ClusterState> cluster_;
  std::optional<Mat> target_p_;
  std::vector<EpochLog> pretrain_log_;
};

struct SweepRow {
  double value = 0.0;
  double acc = 0.0;
  double nmi = 0.0;
  int k = 0;
  bool failed = false;
  std::string error;
};

/// One full seeded run per grid value of `param`
/// (alpha|beta|gamma|xi|p_edge|p_feat). Failures are recorded per cell and
/// the sweep continues.
std::vector<SweepRow> sweep(const Graph& graph, const TrainConfig& base,
                            const std::string& param,
                            const std::vector<double>& grid);

void write_sweep_csv(const std::string& path, const std::string& param,
                     const std::vector<SweepRow>& rows);

}  // namespace gcma

#endif  // GCMA_TRAINER_HPP
