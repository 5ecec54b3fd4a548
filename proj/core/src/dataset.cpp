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

#include "gcma/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gcma/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gcma {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(std::move(tok));
  return out;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Graph load_planetoid(const std::string& content_path, const std::string& cites_path,
                     int* dropped_edges) {
  std::ifstream content(content_path);
  if (!content) throw UsageError("cannot open " + content_path);

  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_ids;
  std::vector<std::string> row_labels;
  std::map<std::string, int> id_to_index;

  std::string line;
  int lineno = 0;
  Index d_in = -1;
  while (std::getline(content, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto toks = split_ws(line);
    if (toks.size() < 3)
      throw ParseError(content_path + ":" + std::to_string(lineno) +
                       ": expected id, features, label");
    if (d_in < 0) d_in = static_cast<Index>(toks.size()) - 2;
    if (static_cast<Index>(toks.size()) - 2 != d_in)
      throw ParseError(content_path + ":" + std::to_string(lineno) +
                       ": inconsistent feature count");
    std::vector<double> feats(static_cast<std::size_t>(d_in));
    for (Index j = 0; j < d_in; ++j) {
      try {
        feats[static_cast<std::size_t>(j)] = std::stod(toks[static_cast<std::size_t>(j) + 1]);
      } catch (const std::exception&) {
        throw ParseError(content_path + ":" + std::to_string(lineno) +
                         ": bad feature value '" + toks[static_cast<std::size_t>(j) + 1] + "'");
      }
    }
    if (id_to_index.count(toks.front()))
      throw ParseError(content_path + ":" + std::to_string(lineno) +
                       ": duplicate node id " + toks.front());
    id_to_index[toks.front()] = static_cast<int>(rows.size());
    row_ids.push_back(toks.front());
    row_labels.push_back(toks.back());
    rows.push_back(std::move(feats));
  }
  if (rows.empty()) throw ParseError(content_path + ": empty dataset");

  Graph g;
  g.n = static_cast<int>(rows.size());
  g.features = Mat(g.n, d_in);
  for (int i = 0; i < g.n; ++i)
    for (Index j = 0; j < d_in; ++j)
      g.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  // label ids assigned by sorted label name so the mapping is stable
  std::map<std::string, int> label_ids;
  for (const auto& l : row_labels) label_ids[l] = 0;
  int next = 0;
  for (auto& [name, id] : label_ids) id = next++;
  g.labels.resize(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i)
    g.labels[static_cast<std::size_t>(i)] = label_ids[row_labels[static_cast<std::size_t>(i)]];
  g.true_k = next;

  std::ifstream cites(cites_path);
  if (!cites) throw UsageError("cannot open " + cites_path);
  std::vector<std::pair<int, int>> edges;
  int dropped = 0;
  lineno = 0;
  while (std::getline(cites, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto toks = split_ws(line);
    if (toks.size() != 2)
      throw ParseError(cites_path + ":" + std::to_string(lineno) +
                       ": expected two node ids");
    auto a = id_to_index.find(toks[0]);
    auto b = id_to_index.find(toks[1]);
    if (a == id_to_index.end() || b == id_to_index.end()) {
      ++dropped;
      continue;
    }
    edges.push_back({a->second, b->second});
  }
  if (dropped_edges) *dropped_edges = dropped;
  g.adj = adjacency_from_edges(g.n, edges);
  return g;
}

std::uint64_t dataset_content_hash(const Graph& graph) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, &graph.n, sizeof(graph.n));
  h = fnv1a(h, graph.features.data(),
            sizeof(double) * static_cast<std::size_t>(graph.features.size()));
  for (const auto& e : graph.adj.entries) {
    h = fnv1a(h, &e.row, sizeof(e.row));
    h = fnv1a(h, &e.col, sizeof(e.col));
    h = fnv1a(h, &e.w, sizeof(e.w));
  }
  if (!graph.labels.empty())
    h = fnv1a(h, graph.labels.data(), sizeof(int) * graph.labels.size());
  return h;
}

void write_dataset(const std::string& dir, const Graph& graph) {
  fs::create_directories(dir);
  {
    json header;
    header["n"] = graph.n;
    header["d_in"] = graph.features.cols();
    if (graph.true_k > 0) header["true_k"] = graph.true_k;
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(dataset_content_hash(graph)));
    header["content_hash"] = hex;
    std::ofstream out(fs::path(dir) / "header.json");
    out << header.dump(2) << "\n";
  }
  {
    std::ofstream out(fs::path(dir) / "features.csv");
    out.precision(17);
    for (int i = 0; i < graph.n; ++i) {
      for (Index j = 0; j < graph.features.cols(); ++j) {
        if (j) out << ",";
        out << graph.features(i, j);
      }
      out << "\n";
    }
  }
  {
    std::ofstream out(fs::path(dir) / "edges.csv");
    out.precision(17);
    for (const auto& e : graph.adj.entries)
      out << e.row << "," << e.col << "," << e.w << "\n";
  }
  if (!graph.labels.empty()) {
    std::ofstream out(fs::path(dir) / "labels.csv");
    for (int l : graph.labels) out << l << "\n";
  }
}

Graph read_dataset(const std::string& dir) {
  std::ifstream hin(fs::path(dir) / "header.json");
  if (!hin) throw UsageError("not a dataset directory (missing header.json): " + dir);
  json header = json::parse(hin);

  Graph g;
  g.n = header.at("n").get<int>();
  const Index d_in = header.at("d_in").get<Index>();
  g.true_k = header.value("true_k", 0);

  g.features = Mat(g.n, d_in);
  {
    std::ifstream in(fs::path(dir) / "features.csv");
    if (!in) throw UsageError("missing features.csv in " + dir);
    std::string line;
    for (int i = 0; i < g.n; ++i) {
      if (!std::getline(in, line))
        throw ParseError("features.csv: expected " + std::to_string(g.n) + " rows");
      std::istringstream ss(line);
      std::string cell;
      for (Index j = 0; j < d_in; ++j) {
        if (!std::getline(ss, cell, ','))
          throw ParseError("features.csv row " + std::to_string(i) + ": too few columns");
        g.features(i, j) = std::stod(cell);
      }
    }
  }
  {
    std::ifstream in(fs::path(dir) / "edges.csv");
    if (!in) throw UsageError("missing edges.csv in " + dir);
    g.adj.n = g.n;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::string a, b, w;
      if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, w))
        throw ParseError("edges.csv:" + std::to_string(lineno) + ": expected src,dst,weight");
      g.adj.entries.push_back({std::stoi(a), std::stoi(b), std::stod(w)});
    }
    g.adj.validate();
  }
  if (fs::exists(fs::path(dir) / "labels.csv")) {
    std::ifstream in(fs::path(dir) / "labels.csv");
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) g.labels.push_back(std::stoi(line));
    if (static_cast<int>(g.labels.size()) != g.n)
      throw ParseError("labels.csv: expected " + std::to_string(g.n) + " labels");
  }
  return g;
}

}  // namespace gcma
