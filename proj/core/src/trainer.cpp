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

#include "gcma/trainer.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gcma/errors.hpp"
#include "gcma/selfopt.hpp"

using nlohmann::json;

namespace gcma {

namespace {

std::vector<double> parse_grid(const std::string& value) {
  std::vector<double> out;
  std::istringstream ss(value);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

json config_json(const TrainConfig& c) {
  json j;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["lambda_1"] = c.lambda_1;
  j["lambda_2"] = c.lambda_2;
  j["lambda_3"] = c.lambda_3;
  j["xi"] = c.xi;
  j["p_edge"] = c.p_edge;
  j["p_feat"] = c.p_feat;
  j["pretrain_epochs"] = c.pretrain_epochs;
  j["joint_epochs"] = c.joint_epochs;
  j["max_iters"] = c.max_iters;
  j["lr_pretrain"] = c.lr_pretrain;
  j["lr_finetune"] = c.lr_finetune;
  j["embed_dim"] = c.embed_dim;
  j["eps_init"] = c.eps_init;
  j["freeze_eps"] = c.freeze_eps;
  j["p_refresh"] = c.p_refresh;
  j["dpeaks_refresh"] = c.dpeaks_refresh;
  j["v"] = c.v;
  j["k_max"] = c.k_max;
  j["dc_grid"] = c.dc_grid;
  j["conv_tol"] = c.conv_tol;
  j["conv_patience"] = c.conv_patience;
  j["seed"] = c.seed;
  return j;
}

json epoch_json(const EpochLog& e) {
  json j;
  j["epoch"] = e.epoch;
  j["lp"] = e.lp;
  j["la"] = e.la;
  j["lc"] = e.lc;
  j["ls"] = e.ls;
  j["total"] = e.total;
  j["eps"] = e.eps;
  j["k"] = e.k;
  return j;
}

}  // namespace

TrainConfig TrainConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  TrainConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string trimmed;
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch))) trimmed += ch;
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected key=value");
    try {
      cfg.set(trimmed.substr(0, eq), trimmed.substr(eq + 1));
    } catch (const ParameterError& e) {
      throw ParameterError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

void TrainConfig::set(const std::string& key, const std::string& value) {
  try {
    if (key == "alpha") alpha = std::stod(value);
    else if (key == "beta") beta = std::stod(value);
    else if (key == "gamma") gamma = std::stod(value);
    else if (key == "lambda_1") lambda_1 = std::stod(value);
    else if (key == "lambda_2") lambda_2 = std::stod(value);
    else if (key == "lambda_3") lambda_3 = std::stod(value);
    else if (key == "xi") xi = std::stod(value);
    else if (key == "p_edge") p_edge = std::stod(value);
    else if (key == "p_feat") p_feat = std::stod(value);
    else if (key == "pretrain_epochs") pretrain_epochs = std::stoi(value);
    else if (key == "joint_epochs") joint_epochs = std::stoi(value);
    else if (key == "max_iters") max_iters = std::stoi(value);
    else if (key == "lr_pretrain") lr_pretrain = std::stod(value);
    else if (key == "lr_finetune") lr_finetune = std::stod(value);
    else if (key == "embed_dim") embed_dim = std::stoi(value);
    else if (key == "eps_init") eps_init = std::stod(value);
    else if (key == "freeze_eps") freeze_eps = std::stoi(value) != 0;
    else if (key == "p_refresh") p_refresh = std::stoi(value);
    else if (key == "dpeaks_refresh") dpeaks_refresh = std::stoi(value);
    else if (key == "v") v = std::stod(value);
    else if (key == "k_max") k_max = std::stoi(value);
    else if (key == "dc_grid") dc_grid = parse_grid(value);
    else if (key == "conv_tol") conv_tol = std::stod(value);
    else if (key == "conv_patience") conv_patience = std::stoi(value);
    else if (key == "seed") seed = std::stoull(value);
    else throw ParameterError("unknown config key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw ParameterError("bad value '" + value + "' for key '" + key + "'");
  }
}

void TrainConfig::validate() const {
  if (alpha < 0 || beta < 0 || gamma < 0)
    throw ParameterError("loss weights must be non-negative");
  if (lambda_1 < 0 || lambda_2 < 0 || lambda_3 < 0)
    throw ParameterError("lambda weights must be non-negative");
  if (xi <= 0) throw ParameterError("xi must be positive");
  if (p_edge < 0 || p_edge > 1 || p_feat < 0 || p_feat > 1)
    throw ParameterError("mask rates must be in [0,1]");
  if (pretrain_epochs < 0 || joint_epochs < 0 || max_iters < 1)
    throw ParameterError("epoch counts must be non-negative, max_iters >= 1");
  if (lr_pretrain <= 0 || lr_finetune <= 0)
    throw ParameterError("learning rates must be positive");
  if (embed_dim < 1) throw ParameterError("embed_dim must be >= 1");
  if (eps_init < 0.0 || eps_init > 1.0)
    throw ParameterError("eps_init must be in [0,1]");
  if (v <= 0) throw ParameterError("v must be positive");
  if (dc_grid.empty()) throw ParameterError("dc_grid must be nonempty");
}

std::string TrainReport::to_json(const TrainConfig& config) const {
  json j;
  j["config"] = config_json(config);
  j["pretrain"] = json::array();
  for (const auto& e : pretrain_log) j["pretrain"].push_back(epoch_json(e));
  j["joint"] = json::array();
  for (const auto& e : joint_log) j["joint"].push_back(epoch_json(e));
  j["final_k"] = final_k;
  j["converged"] = converged;
  j["centers"] = final_state.centers;
  j["labels"] = final_state.labels;
  j["sizes"] = final_state.sizes;
  return j.dump(2) + "\n";
}

void TrainReport::write_epoch_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path);
  out << "phase,epoch,lp,la,lc,ls,total,eps,k\n";
  out.precision(17);
  for (const auto& e : pretrain_log)
    out << "pretrain," << e.epoch << "," << e.lp << "," << e.la << "," << e.lc
        << "," << e.ls << "," << e.total << "," << e.eps << "," << e.k << "\n";
  for (const auto& e : joint_log)
    out << "joint," << e.epoch << "," << e.lp << "," << e.la << "," << e.lc << ","
        << e.ls << "," << e.total << "," << e.eps << "," << e.k << "\n";
}

Trainer::Trainer(const Graph& graph, const TrainConfig& config)
    : graph_(graph), cfg_(config) {
  cfg_.validate();
  enc_cfg_.d_in = static_cast<int>(graph.features.cols());
  enc_cfg_.embed_dim = cfg_.embed_dim;
  enc_cfg_.eps_init = cfg_.eps_init;
  gae_cfg_ = {enc_cfg_.d_in, 256, cfg_.embed_dim};

  Rng init_rng = Rng::derived(cfg_.seed, 0);
  encoder::init_params(store_, enc_cfg_, init_rng);
  decoder::init_params(store_, cfg_.embed_dim, init_rng);
  decoder::gae_init_params(store_, gae_cfg_, init_rng);

  adj_norm_full_ = normalize_adjacency(graph.adj);
  nbrs_full_ = neighbors_with_self(graph.adj);
}

EpochLog Trainer::pretrain_epoch(int epoch) {
  auto masks = sample_masks(graph_, cfg_.p_edge, cfg_.p_feat,
                            Rng::derived(cfg_.seed, 1000 + static_cast<std::uint64_t>(epoch)).next_u64());
  MaskedGraph mg = apply_mask(graph_, masks);
  auto nbrs_masked = neighbors_with_self(mg.adj_masked);

  // detached structural target from the GAE as it trains
  Mat s1 = decoder::structural_target(store_, gae_cfg_, adj_norm_full_, graph_.features);

  Tape t;
  Val x = t.constant(graph_.features);
  Val xm = t.constant(mg.features_masked);

  Val l_gae = decoder::gae_loss(t, store_, gae_cfg_, adj_norm_full_, graph_.adj, x);
  Val z_ae = encoder::encode_ae(t, store_, enc_cfg_, x);
  Val x_rec = encoder::decode_ae(t, store_, enc_cfg_, z_ae);
  Val l_a = decoder::ae_recon_loss(t, x_rec, graph_.features);

  Val z_m = encoder::encode_masked(t, store_, enc_cfg_, nbrs_masked, xm);
  Val l_p;
  if (!mg.masked_nodes.empty()) {
    Val v_hat = decoder::remask(t, store_, z_m, mg.masked_nodes);
    l_p = decoder::info_loss(t, store_, v_hat, s1, z_ae->value,
                             cfg_.loss_weights(), mg.masked_nodes);
  } else {
    l_p = t.constant(Mat::Zero(1, 1));
  }

  Val total = weighted_sum(t, {{1.0, l_p}, {1.0, l_a}, {1.0, l_gae}});

  EpochLog log;
  log.epoch = epoch;
  log.lp = l_p->value(0, 0);
  log.la = l_a->value(0, 0);
  log.total = total->value(0, 0);
  log.eps = encoder::current_eps(store_);

  t.backward(total);
  store_.adam_step(cfg_.lr_pretrain);
  if (cfg_.freeze_eps) store_.at("fusion.eps").value(0, 0) = cfg_.eps_init;
  return log;
}

void Trainer::pretrain() {
  pretrain_log_.clear();
  for (int e = 0; e < cfg_.pretrain_epochs; ++e)
    pretrain_log_.push_back(pretrain_epoch(e));
  // structural target is frozen from here on
  s1_ = decoder::structural_target(store_, gae_cfg_, adj_norm_full_, graph_.features);
  pretrained_ = true;
}

EpochLog Trainer::joint_epoch(int epoch) {
  auto masks = sample_masks(graph_, cfg_.p_edge, cfg_.p_feat,
                            Rng::derived(cfg_.seed, 2000 + static_cast<std::uint64_t>(epoch)).next_u64());
  MaskedGraph mg = apply_mask(graph_, masks);
  auto nbrs_masked = neighbors_with_self(mg.adj_masked);

  Tape t;
  Val x = t.constant(graph_.features);
  Val xm = t.constant(mg.features_masked);

  Val z_m = encoder::encode_masked(t, store_, enc_cfg_, nbrs_masked, xm);
  Val z_ae = encoder::encode_ae(t, store_, enc_cfg_, x);
  Val x_rec = encoder::decode_ae(t, store_, enc_cfg_, z_ae);
  Val z = encoder::fuse(t, store_, z_m, z_ae);

  Val l_a = decoder::ae_recon_loss(t, x_rec, graph_.features);
  Val l_p;
  if (!mg.masked_nodes.empty()) {
    Val v_hat = decoder::remask(t, store_, z, mg.masked_nodes);
    l_p = decoder::info_loss(t, store_, v_hat, s1_, z_ae->value,
                             cfg_.loss_weights(), mg.masked_nodes);
  } else {
    l_p = t.constant(Mat::Zero(1, 1));
  }

  // second decoder: periodic re-estimate of k on the detached embedding
  const bool refresh_dpeaks =
      cfg_.dpeaks_refresh > 0 && epoch % cfg_.dpeaks_refresh == 0;
  if (refresh_dpeaks) {
    auto est = dpeaks::estimate_k(z->value, cfg_.dc_grid, cfg_.k_max);
    const bool k_changed = !cluster_ || cluster_->k != est.state.k;
    cluster_ = est.state;
    if (k_changed) {
      selfopt::reset_centers(store_, z->value, cluster_->centers);
      target_p_.reset();  // L_s history restarts with the new centers
    }
  }

  Val l_c = t.constant(Mat::Zero(1, 1));
  Val l_s = t.constant(Mat::Zero(1, 1));
  if (cluster_) {
    l_c = cluster_wcss(t, z, cluster_->labels, cluster_->means);
    Val mu = leaf(t, store_.at("selfopt.mu"));
    Val q = selfopt::soft_assign(t, z, mu, cfg_.v);
    if (!target_p_ || (cfg_.p_refresh > 0 && epoch % cfg_.p_refresh == 0))
      target_p_ = selfopt::target_distribution(q->value);
    l_s = selfopt::kl_loss(t, *target_p_, q);
  }

  Val total = weighted_sum(
      t, {{1.0, l_p}, {cfg_.alpha, l_a}, {cfg_.beta, l_c}, {cfg_.gamma, l_s}});

  EpochLog log;
  log.epoch = epoch;
  log.lp = l_p->value(0, 0);
  log.la = l_a->value(0, 0);
  log.lc = l_c->value(0, 0);
  log.ls = l_s->value(0, 0);
  log.total = total->value(0, 0);
  log.eps = encoder::current_eps(store_);
  log.k = cluster_ ? cluster_->k : 0;

  t.backward(total);
  store_.adam_step(cfg_.lr_finetune);
  if (cfg_.freeze_eps) store_.at("fusion.eps").value(0, 0) = cfg_.eps_init;
  return log;
}

Mat Trainer::infer_embedding() {
  Tape t;
  Val x = t.constant(graph_.features);
  Val z_m = encoder::encode_masked(t, store_, enc_cfg_, nbrs_full_, x);
  Val z_ae = encoder::encode_ae(t, store_, enc_cfg_, x);
  return encoder::fuse(t, store_, z_m, z_ae)->value;
}

TrainReport Trainer::train_joint() {
  if (!pretrained_) {
    // zero-epoch pretrain still has to freeze the structural target
    s1_ = decoder::structural_target(store_, gae_cfg_, adj_norm_full_, graph_.features);
    pretrained_ = true;
  }

  const auto t0 = std::chrono::steady_clock::now();
  TrainReport report;
  report.pretrain_log = pretrain_log_;

  const int epochs = std::min(cfg_.joint_epochs, cfg_.max_iters);
  double prev_total = 0.0;
  int quiet = 0;
  for (int e = 0; e < epochs; ++e) {
    EpochLog log = joint_epoch(e);
    report.joint_log.push_back(log);
    if (e > 0) {
      const double rel = std::abs(log.total - prev_total) /
                         std::max(std::abs(prev_total), 1e-12);
      quiet = rel < cfg_.conv_tol ? quiet + 1 : 0;
      if (quiet >= cfg_.conv_patience) {
        report.converged = true;
        break;
      }
    }
    prev_total = log.total;
  }

  report.embedding = infer_embedding();
  if (cfg_.dpeaks_refresh > 0) {
    auto est = dpeaks::estimate_k(report.embedding, cfg_.dc_grid, cfg_.k_max);
    report.final_state = est.state;
    report.final_k = est.state.k;
  } else if (cluster_) {
    report.final_state = *cluster_;
    report.final_k = cluster_->k;
  }
  report.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

TrainReport Trainer::run() {
  const auto t0 = std::chrono::steady_clock::now();
  pretrain();
  TrainReport report = train_joint();
  report.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::vector<SweepRow> sweep(const Graph& graph, const TrainConfig& base,
                            const std::string& param,
                            const std::vector<double>& grid) {
  static const std::vector<std::string> kAllowed = {"alpha", "beta",  "gamma",
                                                    "xi",    "p_edge", "p_feat"};
  if (std::find(kAllowed.begin(), kAllowed.end(), param) == kAllowed.end())
    throw ParameterError("sweep: unsupported parameter '" + param + "'");
  if (grid.empty()) throw ParameterError("sweep: empty grid");

  std::vector<SweepRow> rows;
  for (double value : grid) {
    SweepRow row;
    row.value = value;
    try {
      TrainConfig cfg = base;
      std::ostringstream ss;
      ss.precision(17);
      ss << value;
      cfg.set(param, ss.str());
      cfg.validate();
      Trainer trainer(graph, cfg);
      TrainReport report = trainer.run();
      row.k = report.final_k;
      if (graph.has_labels()) {
        row.acc = metrics::accuracy(report.final_state.labels, graph.labels);
        row.nmi = metrics::nmi(report.final_state.labels, graph.labels);
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(const std::string& path, const std::string& param,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path);
  out << param << ",acc,nmi,k,error\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.value << ",";
    if (r.failed)
      out << ",,," << "\"" << r.error << "\"";
    else
      out << r.acc << "," << r.nmi << "," << r.k << ",";
    out << "\n";
  }
}

}  // namespace gcma
