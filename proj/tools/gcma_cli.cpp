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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcma/dataset.hpp"
#include "gcma/dpeaks.hpp"
#include "gcma/errors.hpp"
#include "gcma/heat_kernel.hpp"
#include "gcma/metrics.hpp"
#include "gcma/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gcma;

namespace {

constexpr const char* kVersion = "gcma 0.1.0";

// exit codes, also listed in the README
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitParameter = 4;
constexpr int kExitDivergence = 5;
constexpr int kExitNumeric = 6;

fs::path resolve_out(const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("GCMA_OUT_ROOT")) return fs::path(root) / p;
  return p;
}

// write to a sibling temp file, then rename: a crashed run never leaves a
// half-written artifact under the final name
void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw UsageError("cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string embedding_csv(const Mat& z) {
  std::ostringstream out;
  out.precision(17);
  out << "node_id";
  for (Index j = 0; j < z.cols(); ++j) out << ",z" << j;
  out << "\n";
  for (Index i = 0; i < z.rows(); ++i) {
    out << i;
    for (Index j = 0; j < z.cols(); ++j) out << "," << z(i, j);
    out << "\n";
  }
  return out.str();
}

std::string labels_csv(const std::vector<int>& labels) {
  std::ostringstream out;
  out << "node_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out << i << "," << labels[i] << "\n";
  return out.str();
}

std::vector<int> read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::vector<int> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.find_first_not_of("0123456789,-") != std::string::npos)
      continue;  // header row
    const auto comma = line.find(',');
    const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      labels.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": bad label '" + cell + "'");
    }
  }
  if (labels.empty()) throw ParseError(path + ": no labels");
  return labels;
}

Mat read_embedding_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool has_id = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.find_first_not_of("0123456789.,+-eE ") != std::string::npos) {
      has_id = line.rfind("node_id", 0) == 0;
      continue;
    }
    std::vector<double> row;
    std::istringstream ss(line);
    std::string cell;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first && has_id) {
        first = false;
        continue;
      }
      first = false;
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": bad value '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(path + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no rows");
  Mat z(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      z(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return z;
}

Mat read_feature_csv(const std::string& path) { return read_embedding_csv(path); }

TrainConfig load_config(const std::string& config_path,
                        const std::vector<std::string>& overrides,
                        long long seed_flag) {
  TrainConfig cfg;
  if (!config_path.empty()) cfg = TrainConfig::from_file(config_path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw UsageError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (seed_flag >= 0) cfg.seed = static_cast<std::uint64_t>(seed_flag);
  cfg.validate();
  return cfg;
}

json manifest_json(const TrainConfig& cfg, const std::string& data_dir,
                   const Graph& graph, const fs::path& out_dir) {
  json m;
  m["code_version"] = kVersion;
  m["dataset_dir"] = data_dir;
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << dataset_content_hash(graph);
  m["dataset_hash"] = hex.str();
  m["seed"] = cfg.seed;
  m["config"] = json::parse(TrainReport{}.to_json(cfg))["config"];
  m["outputs"] = {{"report", (out_dir / "report.json").string()},
                  {"epochs", (out_dir / "epochs.csv").string()},
                  {"embedding", (out_dir / "embedding.csv").string()},
                  {"labels", (out_dir / "labels_pred.csv").string()},
                  {"checkpoint", (out_dir / "checkpoint.bin").string()}};
  return m;
}

struct BaselineRow {
  const char* name;
  double acc, nmi, ari;
};

// published reference results for the comparison mode
const std::vector<std::pair<std::string, BaselineRow>> kBaselines = {
    {"cora", {"cora", 0.7474, 0.5916, 0.5541}},
    {"citeseer", {"citeseer", 0.6730, 0.4110, 0.4258}},
    {"dblp", {"dblp", 0.7627, 0.4392, 0.5001}},
};

int run_ingest(const std::string& format, const std::string& content,
               const std::string& cites, const std::string& features,
               const std::string& edges, const std::string& labels, int true_k,
               int neighbors, double t_flag, const std::string& out) {
  Graph g;
  if (format == "planetoid") {
    if (content.empty() || cites.empty())
      throw UsageError("planetoid ingest needs --content and --cites");
    int dropped = 0;
    g = load_planetoid(content, cites, &dropped);
    if (dropped > 0)
      std::cerr << "warning: dropped " << dropped
                << " citation edges with unknown ids\n";
  } else if (format == "csv") {
    if (features.empty() || edges.empty())
      throw UsageError("csv ingest needs --features and --edges");
    g.features = read_feature_csv(features);
    g.n = static_cast<int>(g.features.rows());
    std::ifstream in(edges);
    if (!in) throw UsageError("cannot open " + edges);
    std::vector<std::pair<int, int>> edge_list;
    std::vector<double> weights;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (lineno == 1 && line.find_first_not_of("0123456789.,+-eE") != std::string::npos)
        continue;
      std::istringstream ss(line);
      std::string a, b, w;
      if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
        throw ParseError(edges + ":" + std::to_string(lineno) + ": expected src,dst[,weight]");
      try {
        edge_list.emplace_back(std::stoi(a), std::stoi(b));
        weights.push_back(std::getline(ss, w, ',') ? std::stod(w) : 1.0);
      } catch (const std::exception&) {
        throw ParseError(edges + ":" + std::to_string(lineno) + ": bad edge line");
      }
    }
    g.adj = adjacency_from_edges(g.n, edge_list, &weights);
  } else if (format == "nongraph") {
    if (features.empty()) throw UsageError("nongraph ingest needs --features");
    g.features = read_feature_csv(features);
    g.n = static_cast<int>(g.features.rows());
    const double t = t_flag > 0 ? t_flag : heat_kernel_default_t(g.features);
    g.adj = build_heat_kernel_graph(g.features, neighbors, t);
    std::cerr << "heat kernel: " << neighbors << " neighbors, t = " << t << "\n";
  } else {
    throw UsageError("unknown format '" + format + "'");
  }
  if (!labels.empty()) {
    g.labels = read_labels_csv(labels);
    if (static_cast<int>(g.labels.size()) != g.n)
      throw DimensionError("labels length does not match feature rows");
  }
  if (true_k > 0) {
    g.true_k = true_k;
  } else if (g.has_labels()) {
    int mx = 0;
    for (int l : g.labels) mx = std::max(mx, l + 1);
    g.true_k = mx;
  }

  const fs::path out_dir = resolve_out(out);
  fs::create_directories(out_dir);
  write_dataset(out_dir.string(), g);
  std::cout << "wrote dataset: n=" << g.n << " d_in=" << g.features.cols()
            << " edges(stored)=" << g.adj.entries.size()
            << " true_k=" << g.true_k << " -> " << out_dir.string() << "\n";
  return kExitOk;
}

int run_train(const std::string& data_dir, const std::string& config_path,
              const std::vector<std::string>& overrides, long long seed_flag,
              const std::string& out) {
  TrainConfig cfg = load_config(config_path, overrides, seed_flag);
  Graph g = read_dataset(data_dir);

  const fs::path out_dir = resolve_out(out);
  fs::create_directories(out_dir);
  // manifest goes down first so a crashed run is still replayable
  atomic_write(out_dir / "manifest.json",
               manifest_json(cfg, data_dir, g, out_dir).dump(2) + "\n");

  Trainer trainer(g, cfg);
  TrainReport report = trainer.run();

  atomic_write(out_dir / "report.json", report.to_json(cfg));
  report.write_epoch_csv((out_dir / "epochs.csv").string());
  atomic_write(out_dir / "embedding.csv", embedding_csv(report.embedding));
  atomic_write(out_dir / "labels_pred.csv", labels_csv(report.final_state.labels));
  trainer.params().save((out_dir / "checkpoint.bin").string());

  std::cout << "final k = " << report.final_k
            << (report.converged ? " (converged)" : "") << "\n";
  if (g.has_labels()) {
    auto r = metrics::evaluate(report.final_state.labels, g.labels,
                               report.final_k, g.true_k);
    std::cout.precision(4);
    std::cout << "acc = " << r.acc << "  nmi = " << r.nmi << "  ari = " << r.ari
              << "  (true k = " << g.true_k << ")\n";
  }
  std::cout << "outputs in " << out_dir.string() << "\n";
  return kExitOk;
}

int run_eval(const std::string& truth_path, const std::string& pred_path,
             const std::string& run_dir, const std::string& out_csv,
             const std::string& baseline) {
  std::string pred = pred_path;
  if (pred.empty() && !run_dir.empty())
    pred = (fs::path(run_dir) / "labels_pred.csv").string();
  if (truth_path.empty() || pred.empty())
    throw UsageError("eval needs --truth and either --pred or --run");
  auto truth = read_labels_csv(truth_path);
  auto predicted = read_labels_csv(pred);
  int kp = 0, kt = 0;
  {
    std::map<int, int> a, b;
    for (int l : predicted) a[l] = 1;
    for (int l : truth) b[l] = 1;
    kp = static_cast<int>(a.size());
    kt = static_cast<int>(b.size());
  }
  auto r = metrics::evaluate(predicted, truth, kp, kt);

  std::cout << "metric    value\n";
  std::cout.precision(6);
  std::cout << "acc       " << r.acc << "\n";
  std::cout << "nmi       " << r.nmi << "\n";
  std::cout << "ari       " << r.ari << "\n";
  std::cout << "k_pred    " << r.k_pred << "\n";
  std::cout << "k_true    " << r.k_true << "\n";
  if (!baseline.empty()) {
    for (const auto& [name, row] : kBaselines)
      if (name == baseline) {
        std::cout << "reference (" << name << "): acc " << row.acc << "  nmi "
                  << row.nmi << "  ari " << row.ari << "\n";
      }
  }
  if (!out_csv.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "acc,nmi,ari,k_pred,k_true\n"
        << r.acc << "," << r.nmi << "," << r.ari << "," << r.k_pred << ","
        << r.k_true << "\n";
    atomic_write(resolve_out(out_csv), csv.str());
  }
  return kExitOk;
}

int run_sweep(const std::string& data_dir, const std::string& config_path,
              const std::vector<std::string>& overrides, long long seed_flag,
              const std::string& param, const std::string& grid_str,
              const std::string& out) {
  TrainConfig base = load_config(config_path, overrides, seed_flag);
  Graph g = read_dataset(data_dir);
  std::vector<double> grid;
  {
    std::istringstream ss(grid_str);
    std::string cell;
    while (std::getline(ss, cell, ',')) grid.push_back(std::stod(cell));
  }
  auto rows = sweep(g, base, param, grid);
  write_sweep_csv(resolve_out(out).string(), param, rows);
  std::cout.precision(4);
  for (const auto& r : rows) {
    std::cout << param << " = " << r.value << ": ";
    if (r.failed)
      std::cout << "failed (" << r.error << ")\n";
    else
      std::cout << "acc " << r.acc << "  nmi " << r.nmi << "  k " << r.k << "\n";
  }
  std::cout << "sweep written to " << resolve_out(out).string() << "\n";
  return kExitOk;
}

int run_estimate_k(const std::string& embedding_path,
                   const std::vector<double>& grid, int k_max,
                   const std::string& decision_csv) {
  Mat z = read_embedding_csv(embedding_path);
  auto est = dpeaks::estimate_k(
      z, grid.empty() ? dpeaks::kDefaultGrid : grid, k_max);
  std::cout << "k = " << est.state.k << "  (d_c = " << est.d_c_used
            << ", percentile = " << est.percentile_used << ")\n";
  std::cout << "votes:";
  for (int v : est.votes) std::cout << " " << v;
  std::cout << "\n";
  if (!decision_csv.empty()) {
    Vec gamma = dpeaks::gamma_scores(est.profile.rho, est.profile.delta);
    dpeaks::dump_decision_csv(resolve_out(decision_csv).string(), est.profile,
                              gamma, est.state.labels);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"masked graph autoencoder clustering pipeline"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "convert raw inputs to a canonical dataset dir");
  std::string in_format, in_content, in_cites, in_features, in_edges, in_labels, in_out;
  int in_true_k = 0, in_neighbors = 5;
  double in_t = 0.0;
  ingest->add_option("--format", in_format, "planetoid|csv|nongraph")->required();
  ingest->add_option("--content", in_content, "planetoid .content file");
  ingest->add_option("--cites", in_cites, "planetoid .cites file");
  ingest->add_option("--features", in_features, "feature CSV (csv/nongraph)");
  ingest->add_option("--edges", in_edges, "edge CSV src,dst[,weight] (csv)");
  ingest->add_option("--labels", in_labels, "label CSV (optional)");
  ingest->add_option("--true-k", in_true_k, "ground-truth cluster count");
  ingest->add_option("--neighbors", in_neighbors, "k-NN degree (nongraph)");
  ingest->add_option("--t", in_t, "heat kernel bandwidth (nongraph; 0 = auto)");
  ingest->add_option("--out", in_out, "output dataset dir")->required();

  // train
  auto* train = app.add_subcommand("train", "pretrain + joint train on a dataset dir");
  std::string tr_data, tr_config, tr_out = "run";
  std::vector<std::string> tr_set;
  long long tr_seed = -1;
  train->add_option("--data", tr_data, "canonical dataset dir")->required();
  train->add_option("--config", tr_config, "key=value config file");
  train->add_option("--set", tr_set, "config override key=value (repeatable)");
  train->add_option("--seed", tr_seed, "RNG seed (overrides config)");
  train->add_option("--out", tr_out, "output run dir");

  // eval
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  std::string ev_truth, ev_pred, ev_run, ev_csv, ev_baseline;
  eval->add_option("--truth", ev_truth, "ground-truth label CSV")->required();
  eval->add_option("--pred", ev_pred, "predicted label CSV");
  eval->add_option("--run", ev_run, "run dir containing labels_pred.csv");
  eval->add_option("--csv", ev_csv, "also write metrics CSV here");
  eval->add_option("--baseline", ev_baseline, "print reference row: cora|citeseer|dblp");

  // sweep
  auto* sw = app.add_subcommand("sweep", "one full run per grid value of a parameter");
  std::string sw_data, sw_config, sw_param, sw_grid, sw_out = "sweep.csv";
  std::vector<std::string> sw_set;
  long long sw_seed = -1;
  sw->add_option("--data", sw_data, "canonical dataset dir")->required();
  sw->add_option("--config", sw_config, "key=value config file");
  sw->add_option("--set", sw_set, "config override key=value (repeatable)");
  sw->add_option("--seed", sw_seed, "RNG seed (overrides config)");
  sw->add_option("--param", sw_param, "alpha|beta|gamma|xi|p_edge|p_feat")->required();
  sw->add_option("--grid", sw_grid, "comma-separated values")->required();
  sw->add_option("--out", sw_out, "output CSV");

  // estimate-k
  auto* ek = app.add_subcommand("estimate-k", "density-peaks k estimate on an embedding CSV");
  std::string ek_embedding, ek_decision;
  std::vector<double> ek_grid;
  int ek_kmax = dpeaks::kDefaultKMax;
  ek->add_option("--embedding", ek_embedding, "embedding CSV")->required();
  ek->add_option("--grid", ek_grid, "percentile grid (space separated)");
  ek->add_option("--k-max", ek_kmax, "largest k considered");
  ek->add_option("--decision-csv", ek_decision, "write rho/delta/gamma per node");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest)
      return run_ingest(in_format, in_content, in_cites, in_features, in_edges,
                        in_labels, in_true_k, in_neighbors, in_t, in_out);
    if (*train) return run_train(tr_data, tr_config, tr_set, tr_seed, tr_out);
    if (*eval) return run_eval(ev_truth, ev_pred, ev_run, ev_csv, ev_baseline);
    if (*sw)
      return run_sweep(sw_data, sw_config, sw_set, sw_seed, sw_param, sw_grid, sw_out);
    if (*ek) return run_estimate_k(ek_embedding, ek_grid, ek_kmax, ek_decision);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const TrainingDivergence& e) {
    std::cerr << "error: training diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const NumericDomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DegenerateDistanceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
