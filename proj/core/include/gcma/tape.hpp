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

#ifndef GCMA_TAPE_HPP
#define GCMA_TAPE_HPP

#include <functional>
#include <memory>
#include <vector>

#include "gcma/tensor.hpp"

namespace gcma {

// Reverse-mode tape over dense matrices. The operation set is closed and
// small (the fixed layers of the pipeline), so every op registers an
// explicit pull function instead of going through a generic autodiff
// dispatcher. Creation order is topological order; backward() walks the
// tape in reverse and then clears it.

struct Node {
  Mat value;
  Mat grad;  // allocated on first use
  bool needs_grad = false;
  std::function<void(Node&)> pull;

  Mat& g() {
    if (grad.size() == 0) grad = Mat::Zero(value.rows(), value.cols());
    return grad;
  }
};

using Val = Node*;

class Tape {
 public:
  Val make(Mat value, bool needs_grad);
  Val constant(Mat value) { return make(std::move(value), false); }

  /// Reverse sweep from a 1x1 loss node; clears the tape afterwards.
  /// Parameter leaves flush their gradients into the owning ParamStore
  /// through their pull functions before the clear.
  void backward(Val loss);

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<std::unique_ptr<Node>> nodes_;
};

}  // namespace gcma

#endif  // GCMA_TAPE_HPP
