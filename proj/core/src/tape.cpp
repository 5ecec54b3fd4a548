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

#include "gcma/tape.hpp"

#include "gcma/errors.hpp"

namespace gcma {

Val Tape::make(Mat value, bool needs_grad) {
  auto node = std::make_unique<Node>();
  node->value = std::move(value);
  node->needs_grad = needs_grad;
  Val p = node.get();
  nodes_.push_back(std::move(node));
  return p;
}

void Tape::backward(Val loss) {
  if (loss->value.rows() != 1 || loss->value.cols() != 1)
    throw UsageError("backward: loss must be a 1x1 scalar node");
  loss->g()(0, 0) = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node& n = **it;
    if (n.needs_grad && n.pull && n.grad.size() != 0) n.pull(n);
  }
  clear();
}

}  // namespace gcma
