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

#include "gcma/ops.hpp"

#include <cmath>

#include "gcma/errors.hpp"

namespace gcma {

namespace {
constexpr double kNormGuard = 1e-12;

void check_same_shape(Val a, Val b, const char* op) {
  if (a->value.rows() != b->value.rows() || a->value.cols() != b->value.cols())
    throw DimensionError(std::string(op) + ": shape mismatch");
}
}  // namespace

Val leaf(Tape& t, Param& p) {
  Val y = t.make(p.value, true);
  Param* pp = &p;
  y->pull = [pp](Node& n) { pp->grad += n.grad; };
  return y;
}

Val matmul(Tape& t, Val a, Val b) {
  if (a->value.cols() != b->value.rows())
    throw DimensionError("matmul: inner dimensions differ");
  Val y = t.make(a->value * b->value, a->needs_grad || b->needs_grad);
  if (y->needs_grad)
    y->pull = [a, b](Node& n) {
      if (a->needs_grad) a->g().noalias() += n.grad * b->value.transpose();
      if (b->needs_grad) b->g().noalias() += a->value.transpose() * n.grad;
    };
  return y;
}

Val spmm(Tape& t, const SparseAdj& a, Val x) {
  if (a.n != x->value.rows())
    throw DimensionError("spmm: adjacency size does not match rows of x");
  Mat out = Mat::Zero(a.n, x->value.cols());
  for (const auto& e : a.entries)
    out.row(e.row) += e.w * x->value.row(e.col);
  Val y = t.make(std::move(out), x->needs_grad);
  if (y->needs_grad) {
    const SparseAdj* ap = &a;
    y->pull = [ap, x](Node& n) {
      Mat& gx = x->g();
      for (const auto& e : ap->entries)
        gx.row(e.col) += e.w * n.grad.row(e.row);
    };
  }
  return y;
}

Val add(Tape& t, Val a, Val b) {
  check_same_shape(a, b, "add");
  Val y = t.make(a->value + b->value, a->needs_grad || b->needs_grad);
  if (y->needs_grad)
    y->pull = [a, b](Node& n) {
      if (a->needs_grad) a->g() += n.grad;
      if (b->needs_grad) b->g() += n.grad;
    };
  return y;
}

Val sub(Tape& t, Val a, Val b) {
  check_same_shape(a, b, "sub");
  Val y = t.make(a->value - b->value, a->needs_grad || b->needs_grad);
  if (y->needs_grad)
    y->pull = [a, b](Node& n) {
      if (a->needs_grad) a->g() += n.grad;
      if (b->needs_grad) b->g() -= n.grad;
    };
  return y;
}

Val hadamard(Tape& t, Val a, Val b) {
  check_same_shape(a, b, "hadamard");
  Val y = t.make(a->value.cwiseProduct(b->value), a->needs_grad || b->needs_grad);
  if (y->needs_grad)
    y->pull = [a, b](Node& n) {
      if (a->needs_grad) a->g() += n.grad.cwiseProduct(b->value);
      if (b->needs_grad) b->g() += n.grad.cwiseProduct(a->value);
    };
  return y;
}

Val add_rowvec(Tape& t, Val a, Val bias) {
  if (bias->value.rows() != 1 || bias->value.cols() != a->value.cols())
    throw DimensionError("add_rowvec: bias must be 1 x cols(a)");
  Mat out = a->value.rowwise() + bias->value.row(0);
  Val y = t.make(std::move(out), a->needs_grad || bias->needs_grad);
  if (y->needs_grad)
    y->pull = [a, bias](Node& n) {
      if (a->needs_grad) a->g() += n.grad;
      if (bias->needs_grad) bias->g().row(0) += n.grad.colwise().sum();
    };
  return y;
}

Val scale(Tape& t, Val a, double s) {
  Val y = t.make(s * a->value, a->needs_grad);
  if (y->needs_grad)
    y->pull = [a, s](Node& n) { a->g() += s * n.grad; };
  return y;
}

Val leaky_relu(Tape& t, Val a, double slope) {
  Mat out = a->value.unaryExpr([slope](double x) { return x > 0.0 ? x : slope * x; });
  Val y = t.make(std::move(out), a->needs_grad);
  if (y->needs_grad)
    y->pull = [a, slope](Node& n) {
      a->g() += n.grad.cwiseProduct(
          a->value.unaryExpr([slope](double x) { return x > 0.0 ? 1.0 : slope; }));
    };
  return y;
}

Val exp_op(Tape& t, Val a) {
  Val y = t.make(a->value.array().exp().matrix(), a->needs_grad);
  if (y->needs_grad)
    y->pull = [a](Node& n) { a->g() += n.grad.cwiseProduct(n.value); };
  return y;
}

Val log_op(Tape& t, Val a) {
  if ((a->value.array() <= 0.0).any())
    throw NumericDomainError("log: non-positive input");
  Val y = t.make(a->value.array().log().matrix(), a->needs_grad);
  if (y->needs_grad)
    y->pull = [a](Node& n) { a->g() += n.grad.cwiseQuotient(a->value); };
  return y;
}

Val sigmoid(Tape& t, Val a) {
  Mat out = (1.0 / (1.0 + (-a->value.array()).exp())).matrix();
  Val y = t.make(std::move(out), a->needs_grad);
  if (y->needs_grad)
    y->pull = [a](Node& n) {
      a->g() += (n.grad.array() * n.value.array() * (1.0 - n.value.array())).matrix();
    };
  return y;
}

Val softmax_row(Tape& t, Val a) {
  Mat out = a->value;
  for (Index i = 0; i < out.rows(); ++i) {
    const double mx = out.row(i).maxCoeff();
    out.row(i) = (out.row(i).array() - mx).exp();
    out.row(i) /= out.row(i).sum();
  }
  Val y = t.make(std::move(out), a->needs_grad);
  if (y->needs_grad)
    y->pull = [a](Node& n) {
      for (Index i = 0; i < n.value.rows(); ++i) {
        const double dot = n.grad.row(i).dot(n.value.row(i));
        a->g().row(i) +=
            (n.value.row(i).array() * (n.grad.row(i).array() - dot)).matrix();
      }
    };
  return y;
}

Val l2_normalize_row(Tape& t, Val a) {
  Mat out = a->value;
  Vec norms(out.rows());
  for (Index i = 0; i < out.rows(); ++i) {
    norms(i) = out.row(i).norm() + kNormGuard;
    out.row(i) /= norms(i);
  }
  Val y = t.make(std::move(out), a->needs_grad);
  if (y->needs_grad)
    y->pull = [a, norms](Node& n) {
      for (Index i = 0; i < n.value.rows(); ++i) {
        const double nn = norms(i);
        const double raw = nn - kNormGuard;
        a->g().row(i) += n.grad.row(i) / nn;
        if (raw > 1e-300) {
          const double dot = n.grad.row(i).dot(a->value.row(i));
          a->g().row(i) -= a->value.row(i) * (dot / (nn * nn * raw));
        }
      }
    };
  return y;
}

Val elementwise(Tape& t, EwOp op, Val a) {
  switch (op) {
    case EwOp::kLeakyRelu: return leaky_relu(t, a);
    case EwOp::kExp: return exp_op(t, a);
    case EwOp::kLog: return log_op(t, a);
    case EwOp::kSoftmaxRow: return softmax_row(t, a);
    case EwOp::kL2NormalizeRow: return l2_normalize_row(t, a);
  }
  throw UsageError("elementwise: unknown op");
}

Val concat_cols(Tape& t, Val a, Val b) {
  if (a->value.rows() != b->value.rows())
    throw DimensionError("concat_cols: row counts differ");
  Mat out(a->value.rows(), a->value.cols() + b->value.cols());
  out << a->value, b->value;
  Val y = t.make(std::move(out), a->needs_grad || b->needs_grad);
  if (y->needs_grad)
    y->pull = [a, b](Node& n) {
      const Index ca = a->value.cols();
      if (a->needs_grad) a->g() += n.grad.leftCols(ca);
      if (b->needs_grad) b->g() += n.grad.rightCols(b->value.cols());
    };
  return y;
}

Val select_rows(Tape& t, Val a, const std::vector<int>& idx) {
  Mat out(static_cast<Index>(idx.size()), a->value.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= a->value.rows())
      throw DimensionError("select_rows: index out of range");
    out.row(static_cast<Index>(i)) = a->value.row(idx[i]);
  }
  Val y = t.make(std::move(out), a->needs_grad);
  if (y->needs_grad)
    y->pull = [a, idx](Node& n) {
      for (std::size_t i = 0; i < idx.size(); ++i)
        a->g().row(idx[i]) += n.grad.row(static_cast<Index>(i));
    };
  return y;
}

Val remask_rows(Tape& t, Val a, const std::vector<int>& idx, Val token) {
  if (token->value.rows() != 1 || token->value.cols() != a->value.cols())
    throw DimensionError("remask_rows: token must be 1 x cols(a)");
  Mat out = a->value;
  for (int i : idx) {
    if (i < 0 || i >= a->value.rows())
      throw DimensionError("remask_rows: index out of range");
    out.row(i) = token->value.row(0);
  }
  Val y = t.make(std::move(out), a->needs_grad || token->needs_grad);
  if (y->needs_grad)
    y->pull = [a, token, idx](Node& n) {
      if (a->needs_grad) {
        Mat g = n.grad;
        for (int i : idx) g.row(i).setZero();
        a->g() += g;
      }
      if (token->needs_grad)
        for (int i : idx) token->g().row(0) += n.grad.row(i);
    };
  return y;
}

Val scalar_mix(Tape& t, Val a, Val b, Val eps) {
  check_same_shape(a, b, "scalar_mix");
  if (eps->value.size() != 1) throw DimensionError("scalar_mix: eps must be 1x1");
  const double e = eps->value(0, 0);
  Val y = t.make((1.0 - e) * a->value + e * b->value,
                 a->needs_grad || b->needs_grad || eps->needs_grad);
  if (y->needs_grad)
    y->pull = [a, b, eps, e](Node& n) {
      if (a->needs_grad) a->g() += (1.0 - e) * n.grad;
      if (b->needs_grad) b->g() += e * n.grad;
      if (eps->needs_grad)
        eps->g()(0, 0) += n.grad.cwiseProduct(b->value - a->value).sum();
    };
  return y;
}

Val sum_all(Tape& t, Val a) {
  Mat out(1, 1);
  out(0, 0) = a->value.sum();
  Val y = t.make(std::move(out), a->needs_grad);
  if (y->needs_grad)
    y->pull = [a](Node& n) { a->g().array() += n.grad(0, 0); };
  return y;
}

Val mean_all(Tape& t, Val a) {
  const double count = static_cast<double>(a->value.size());
  Mat out(1, 1);
  out(0, 0) = a->value.sum() / count;
  Val y = t.make(std::move(out), a->needs_grad);
  if (y->needs_grad)
    y->pull = [a, count](Node& n) { a->g().array() += n.grad(0, 0) / count; };
  return y;
}

Val mse_const(Tape& t, Val x, const Mat& target) {
  if (x->value.rows() != target.rows() || x->value.cols() != target.cols())
    throw DimensionError("mse_const: shape mismatch");
  const double count = static_cast<double>(target.size());
  Mat diff = x->value - target;
  Mat out(1, 1);
  out(0, 0) = diff.squaredNorm() / count;
  Val y = t.make(std::move(out), x->needs_grad);
  if (y->needs_grad)
    y->pull = [x, diff, count](Node& n) {
      x->g() += (2.0 / count) * n.grad(0, 0) * diff;
    };
  return y;
}

Val info_nce(Tape& t, Val logits) {
  const Index m = logits->value.rows();
  if (m != logits->value.cols())
    throw DimensionError("info_nce: logits must be square");
  Mat soft = logits->value;
  double loss = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double mx = soft.row(i).maxCoeff();
    soft.row(i) = (soft.row(i).array() - mx).exp();
    const double s = soft.row(i).sum();
    loss += std::log(s) + mx - logits->value(i, i);
    soft.row(i) /= s;
  }
  Mat out(1, 1);
  out(0, 0) = loss / static_cast<double>(m);
  Val y = t.make(std::move(out), logits->needs_grad);
  if (y->needs_grad)
    y->pull = [logits, soft, m](Node& n) {
      Mat g = soft;
      for (Index i = 0; i < m; ++i) g(i, i) -= 1.0;
      logits->g() += (n.grad(0, 0) / static_cast<double>(m)) * g;
    };
  return y;
}

Val student_q(Tape& t, Val z, Val centers, double v) {
  const Index n = z->value.rows();
  const Index k = centers->value.rows();
  if (k < 1) throw UsageError("student_q: need at least one center");
  if (z->value.cols() != centers->value.cols())
    throw DimensionError("student_q: dimension mismatch");
  const double expo = (v + 1.0) / 2.0;
  Mat s(n, k);
  Mat base(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < k; ++j) {
      const double d2 = (z->value.row(i) - centers->value.row(j)).squaredNorm();
      base(i, j) = 1.0 + d2 / v;
      s(i, j) = std::pow(base(i, j), -expo);
    }
  Vec rowsum = s.rowwise().sum();
  Mat q = s.array().colwise() / rowsum.array();
  Val y = t.make(std::move(q), z->needs_grad || centers->needs_grad);
  if (y->needs_grad)
    y->pull = [z, centers, s, base, rowsum, v, expo, n, k](Node& node) {
      for (Index i = 0; i < n; ++i) {
        const double dot = node.grad.row(i).dot(node.value.row(i));
        for (Index j = 0; j < k; ++j) {
          const double ds = (node.grad(i, j) - dot) / rowsum(i);
          const double dd2 = ds * (-expo / v) * s(i, j) / base(i, j);
          const auto diff = z->value.row(i) - centers->value.row(j);
          if (z->needs_grad) z->g().row(i) += 2.0 * dd2 * diff;
          if (centers->needs_grad) centers->g().row(j) -= 2.0 * dd2 * diff;
        }
      }
    };
  return y;
}

Val kl_const_p(Tape& t, const Mat& p, Val q) {
  if (p.rows() != q->value.rows() || p.cols() != q->value.cols())
    throw DimensionError("kl_const_p: shape mismatch");
  double loss = 0.0;
  for (Index i = 0; i < p.rows(); ++i)
    for (Index j = 0; j < p.cols(); ++j) {
      const double pij = p(i, j);
      if (pij <= 0.0) continue;
      const double qij = q->value(i, j);
      if (qij <= 0.0)
        throw NumericDomainError("kl_const_p: q is zero where p > 0");
      loss += pij * std::log(pij / qij);
    }
  Mat out(1, 1);
  out(0, 0) = loss;
  Val y = t.make(std::move(out), q->needs_grad);
  if (y->needs_grad) {
    Mat pc = p;
    y->pull = [q, pc](Node& n) {
      q->g() -= n.grad(0, 0) * pc.cwiseQuotient(q->value);
    };
  }
  return y;
}

Val cluster_wcss(Tape& t, Val z, const std::vector<int>& labels, const Mat& means) {
  if (static_cast<Index>(labels.size()) != z->value.rows())
    throw DimensionError("cluster_wcss: label count mismatch");
  double loss = 0.0;
  for (Index i = 0; i < z->value.rows(); ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    if (c < 0 || c >= means.rows())
      throw DimensionError("cluster_wcss: label out of range");
    loss += (z->value.row(i) - means.row(c)).squaredNorm();
  }
  Mat out(1, 1);
  out(0, 0) = loss;
  Val y = t.make(std::move(out), z->needs_grad);
  if (y->needs_grad) {
    Mat mc = means;
    y->pull = [z, labels, mc](Node& n) {
      for (Index i = 0; i < z->value.rows(); ++i) {
        const int c = labels[static_cast<std::size_t>(i)];
        z->g().row(i) += 2.0 * n.grad(0, 0) * (z->value.row(i) - mc.row(c));
      }
    };
  }
  return y;
}

Val gae_recon_loss(Tape& t, Val z, const SparseAdj& adj, double pos_weight) {
  const Index n = z->value.rows();
  if (adj.n != n) throw DimensionError("gae_recon_loss: size mismatch");
  Mat a = Mat::Zero(n, n);
  for (const auto& e : adj.entries)
    if (e.w != 0.0) a(e.row, e.col) = 1.0;
  const double inv = 1.0 / (static_cast<double>(n) * static_cast<double>(n));

  constexpr Index kBlock = 256;
  double loss = 0.0;
  for (Index r0 = 0; r0 < n; r0 += kBlock) {
    const Index rows = std::min(kBlock, n - r0);
    Mat logits = z->value.middleRows(r0, rows) * z->value.transpose();
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < n; ++j) {
        const double x = logits(i, j);
        // log(1+exp(x)) evaluated stably
        const double sp = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
        if (a(r0 + i, j) != 0.0)
          loss += pos_weight * (sp - x);
        else
          loss += sp;
      }
  }
  Mat out(1, 1);
  out(0, 0) = loss * inv;
  Val y = t.make(std::move(out), z->needs_grad);
  if (y->needs_grad) {
    Mat ac = std::move(a);
    y->pull = [z, ac, pos_weight, inv, n, kBlock](Node& node) {
      const double up = node.grad(0, 0);
      Mat gz = Mat::Zero(n, z->value.cols());
      for (Index r0 = 0; r0 < n; r0 += kBlock) {
        const Index rows = std::min(kBlock, n - r0);
        Mat logits = z->value.middleRows(r0, rows) * z->value.transpose();
        Mat d(rows, n);
        for (Index i = 0; i < rows; ++i)
          for (Index j = 0; j < n; ++j) {
            const double s = 1.0 / (1.0 + std::exp(-logits(i, j)));
            d(i, j) = ac(r0 + i, j) != 0.0 ? pos_weight * (s - 1.0) : s;
          }
        d *= up * inv;
        // dL/dZ = (D + D^T) Z accumulated per block
        gz.middleRows(r0, rows) += d * z->value;
        gz.noalias() += d.transpose() * z->value.middleRows(r0, rows);
      }
      z->g() += gz;
    };
  }
  return y;
}

Val weighted_sum(Tape& t, const std::vector<std::pair<double, Val>>& terms) {
  bool needs = false;
  double total = 0.0;
  for (const auto& [w, v] : terms) {
    if (v->value.size() != 1) throw DimensionError("weighted_sum: terms must be 1x1");
    total += w * v->value(0, 0);
    needs = needs || v->needs_grad;
  }
  Mat out(1, 1);
  out(0, 0) = total;
  Val y = t.make(std::move(out), needs);
  if (needs) {
    auto terms_copy = terms;
    y->pull = [terms_copy](Node& n) {
      for (const auto& [w, v] : terms_copy)
        if (v->needs_grad) v->g()(0, 0) += w * n.grad(0, 0);
    };
  }
  return y;
}

}  // namespace gcma
