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

#include "gcma/params.hpp"

#include <cmath>
#include <fstream>

#include "gcma/errors.hpp"

namespace gcma {

Param& ParamStore::add(const std::string& name, Index rows, Index cols) {
  if (params_.count(name)) throw UsageError("ParamStore: duplicate parameter " + name);
  Param& p = params_[name];
  p.value = Mat::Zero(rows, cols);
  p.grad = Mat::Zero(rows, cols);
  p.m1 = Mat::Zero(rows, cols);
  p.m2 = Mat::Zero(rows, cols);
  return p;
}

Param& ParamStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw UsageError("ParamStore: unknown parameter " + name);
  return it->second;
}

const Param& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw UsageError("ParamStore: unknown parameter " + name);
  return it->second;
}

void ParamStore::zero_grad() {
  for (auto& [name, p] : params_) p.grad.setZero();
}

void ParamStore::adam_step(double lr, double beta1, double beta2, double eps) {
  for (auto& [name, p] : params_) {
    if (!p.grad.allFinite())
      throw TrainingDivergence("NaN/Inf gradient in parameter " + name);
    if ((p.grad.array() == 0.0).all()) continue;
    p.steps += 1;
    p.m1 = beta1 * p.m1 + (1.0 - beta1) * p.grad;
    p.m2 = beta2 * p.m2.array() + (1.0 - beta2) * p.grad.array().square();
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(p.steps));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(p.steps));
    p.value.array() -=
        lr * (p.m1.array() / c1) / ((p.m2.array() / c2).sqrt() + eps);
    p.grad.setZero();
  }
}

void ParamStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open checkpoint for writing: " + path);
  out << "GCMA-CKPT v1\n" << params_.size() << "\n";
  for (const auto& [name, p] : params_)
    out << name << " " << p.value.rows() << " " << p.value.cols() << "\n";
  for (const auto& [name, p] : params_)
    out.write(reinterpret_cast<const char*>(p.value.data()),
              static_cast<std::streamsize>(sizeof(double) * p.value.size()));
  if (!out) throw UsageError("short write on checkpoint: " + path);
}

void ParamStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open checkpoint: " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "GCMA-CKPT" || version != "v1")
    throw ParseError("checkpoint version mismatch: got '" + magic + " " + version + "'");
  std::size_t count = 0;
  in >> count;
  std::vector<std::pair<std::string, std::pair<Index, Index>>> shapes;
  for (std::size_t i = 0; i < count; ++i) {
    std::string name;
    Index r, c;
    in >> name >> r >> c;
    shapes.push_back({name, {r, c}});
  }
  in.ignore(1);  // newline before binary block
  params_.clear();
  for (auto& [name, shape] : shapes) {
    Param& p = add(name, shape.first, shape.second);
    in.read(reinterpret_cast<char*>(p.value.data()),
            static_cast<std::streamsize>(sizeof(double) * p.value.size()));
  }
  if (!in) throw ParseError("truncated checkpoint: " + path);
}

void glorot_init(Mat& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Index j = 0; j < w.cols(); ++j)
    for (Index i = 0; i < w.rows(); ++i)
      w(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
}

}  // namespace gcma
