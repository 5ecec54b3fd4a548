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

#ifndef GCMA_PARAMS_HPP
#define GCMA_PARAMS_HPP

#include <map>
#include <string>

#include "gcma/rng.hpp"
#include "gcma/tensor.hpp"

namespace gcma {

/// A named trainable tensor with its gradient and Adam moment buffers.
struct Param {
  Mat value;
  Mat grad;
  Mat m1;  // first moment
  Mat m2;  // second moment
  long steps = 0;
};

class ParamStore {
 public:
  Param& add(const std::string& name, Index rows, Index cols);
  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;
  bool has(const std::string& name) const { return params_.count(name) != 0; }
  void remove(const std::string& name) { params_.erase(name); }

  void zero_grad();

  /// One Adam update over every parameter with a nonzero gradient.
  /// Parameters whose gradient is identically zero are left untouched
  /// (frozen sub-networks keep their values and moments). Gradients are
  /// zeroed after the step. NaN gradients abort the run.
  void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-8);

  /// Checkpoint: "GCMA-CKPT v1" header, shape table, raw 64-bit values.
  /// Optimizer moments are not persisted.
  void save(const std::string& path) const;
  void load(const std::string& path);

  std::map<std::string, Param>& all() { return params_; }
  const std::map<std::string, Param>& all() const { return params_; }

 private:
  std::map<std::string, Param> params_;  // ordered: deterministic iteration
};

/// Glorot-uniform initialization, deterministic under the given stream.
void glorot_init(Mat& w, Rng& rng);

}  // namespace gcma

#endif  // GCMA_PARAMS_HPP
