// Copyright 2026 The genret Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Reverse-mode autodiff over small dense tensors (rank <= 2). Values are
// computed eagerly as nodes are created; backward() walks the tape in reverse
// creation order. Leaf nodes reference external storage, so parameters are
// never copied onto the tape. Hinge uses subgradient 0 at the kink.

#ifndef GENRET_TAPE_HPP
#define GENRET_TAPE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "genret/common.hpp"

namespace genret {

template <class Real>
class tape {
 public:
  using index = std::int32_t;

  void reset() {
    nodes_.clear();
    vals_.clear();
    aux_.clear();
    total_ = 0;
  }

  // External values; gradients accumulate here on backward().
  index leaf(const Real* data, int rows, int cols) {
    node n;
    n.kind = op::leaf;
    n.rows = rows;
    n.cols = cols;
    n.ext = data;
    n.grad = total_;
    total_ += static_cast<std::size_t>(rows) * cols;
    return push(n);
  }

  index leaf(std::span<const Real> v) { return leaf(v.data(), static_cast<int>(v.size()), 1); }

  // y = W x
  index matvec(index w, index x) {
    const int wr = at(w).rows, wc = at(w).cols;
    require(wc == at(x).rows && at(x).cols == 1, "matvec shape mismatch");
    index id = alloc(op::matvec, wr, 1, w, x);
    const Real* wv = values(w);
    const Real* xv = values(x);
    Real* out = val_ptr(id);
    for (int r = 0; r < wr; ++r) {
      const Real* row = wv + static_cast<std::size_t>(r) * wc;
      Real s = 0;
      for (int c = 0; c < wc; ++c) s += row[c] * xv[c];
      out[r] = s;
    }
    return id;
  }

  index add(index a, index b) {
    const int rows = at(a).rows, cols = at(a).cols;
    require(rows == at(b).rows && cols == at(b).cols, "add shape mismatch");
    index id = alloc(op::add, rows, cols, a, b);
    const Real* av = values(a);
    const Real* bv = values(b);
    Real* out = val_ptr(id);
    for (int i = 0; i < rows * cols; ++i) out[i] = av[i] + bv[i];
    return id;
  }

  index sub(index a, index b) {
    const int rows = at(a).rows, cols = at(a).cols;
    require(rows == at(b).rows && cols == at(b).cols, "sub shape mismatch");
    index id = alloc(op::sub, rows, cols, a, b);
    const Real* av = values(a);
    const Real* bv = values(b);
    Real* out = val_ptr(id);
    for (int i = 0; i < rows * cols; ++i) out[i] = av[i] - bv[i];
    return id;
  }

  index tanh_op(index a) {
    const int rows = at(a).rows, cols = at(a).cols;
    index id = alloc(op::tanh_, rows, cols, a);
    const Real* av = values(a);
    Real* out = val_ptr(id);
    for (int i = 0; i < rows * cols; ++i) out[i] = std::tanh(av[i]);
    return id;
  }

  index concat(index a, index b) {
    const int an = at(a).rows, bn = at(b).rows;
    require(at(a).cols == 1 && at(b).cols == 1, "concat expects vectors");
    index id = alloc(op::concat, an + bn, 1, a, b);
    Real* out = val_ptr(id);
    const Real* av = values(a);
    const Real* bv = values(b);
    for (int i = 0; i < an; ++i) out[i] = av[i];
    for (int i = 0; i < bn; ++i) out[an + i] = bv[i];
    return id;
  }

  // Mean over prefix positions of (token_embedding[tok_i] + position_embedding[i]).
  index embed_mean(index token_emb, index pos_emb, std::span<const int> tokens) {
    const node& te = at(token_emb);
    const node& pe = at(pos_emb);
    require(te.cols == pe.cols, "embedding width mismatch");
    const int m = static_cast<int>(tokens.size());
    require(m >= 1, "embed_mean needs a non-empty prefix");
    require(m <= pe.rows, "prefix longer than position table");
    index id = alloc(op::embed_mean, te.cols, 1, token_emb, pos_emb);
    node& n = nodes_.back();
    n.aux = static_cast<int>(aux_.size());
    n.naux = m;
    for (int t : tokens) {
      require(t >= 0 && t < te.rows, "token id out of range");
      aux_.push_back(t);
    }
    const Real* tv = values(token_emb);
    const Real* pv = values(pos_emb);
    Real* out = val_ptr(id);
    const Real inv = Real(1) / static_cast<Real>(m);
    for (int e = 0; e < te.cols; ++e) out[e] = 0;
    for (int i = 0; i < m; ++i) {
      const Real* trow = tv + static_cast<std::size_t>(tokens[i]) * te.cols;
      const Real* prow = pv + static_cast<std::size_t>(i) * pe.cols;
      for (int e = 0; e < te.cols; ++e) out[e] += trow[e] + prow[e];
    }
    for (int e = 0; e < te.cols; ++e) out[e] *= inv;
    return id;
  }

  // -log softmax(logits)[target], stable log-sum-exp form.
  index cross_entropy(index logits, int target) {
    const node& ln = at(logits);
    require(ln.cols == 1, "cross_entropy expects a logit vector");
    require(target >= 0 && target < ln.rows, "target out of range");
    index id = alloc(op::cross_entropy, 1, 1, logits);
    nodes_.back().tag = target;
    const Real* x = values(logits);
    Real mx = x[0];
    for (int i = 1; i < ln.rows; ++i) mx = std::max(mx, x[i]);
    Real s = 0;
    for (int i = 0; i < ln.rows; ++i) s += std::exp(x[i] - mx);
    *val_ptr(id) = (mx + std::log(s)) - x[target];
    return id;
  }

  index add_scalar(index a, Real c) {
    const node& an = at(a);
    index id = alloc(op::add_scalar, an.rows, an.cols, a);
    nodes_.back().c = c;
    const Real* av = values(a);
    Real* out = val_ptr(id);
    for (int i = 0; i < an.rows * an.cols; ++i) out[i] = av[i] + c;
    return id;
  }

  index scale(index a, Real s) {
    const node& an = at(a);
    index id = alloc(op::scale, an.rows, an.cols, a);
    nodes_.back().c = s;
    const Real* av = values(a);
    Real* out = val_ptr(id);
    for (int i = 0; i < an.rows * an.cols; ++i) out[i] = av[i] * s;
    return id;
  }

  index hinge(index a) {
    const node& an = at(a);
    index id = alloc(op::hinge, an.rows, an.cols, a);
    const Real* av = values(a);
    Real* out = val_ptr(id);
    for (int i = 0; i < an.rows * an.cols; ++i) out[i] = av[i] > 0 ? av[i] : Real(0);
    return id;
  }

  // Sum of scalar nodes.
  index sum(std::span<const index> parts) {
    require(!parts.empty(), "sum of nothing");
    index id = alloc(op::sum_, 1, 1);
    node& n = nodes_.back();
    n.aux = static_cast<int>(aux_.size());
    n.naux = static_cast<int>(parts.size());
    Real s = 0;
    for (index p : parts) {
      require(at(p).rows == 1 && at(p).cols == 1, "sum expects scalars");
      aux_.push_back(p);
      s += *values(p);
    }
    *val_ptr(id) = s;
    return id;
  }

  // Squared Euclidean distance of two vectors.
  index sqdist(index a, index b) {
    const node& an = at(a);
    require(an.rows == at(b).rows && an.cols == 1 && at(b).cols == 1, "sqdist shape mismatch");
    index id = alloc(op::sqdist, 1, 1, a, b);
    const Real* av = values(a);
    const Real* bv = values(b);
    Real s = 0;
    for (int i = 0; i < an.rows; ++i) {
      const Real d = av[i] - bv[i];
      s += d * d;
    }
    *val_ptr(id) = s;
    return id;
  }

  const Real* values(index id) const {
    const node& n = at(id);
    return n.ext ? n.ext : &vals_[n.val];
  }

  Real scalar(index id) const {
    require(at(id).rows == 1 && at(id).cols == 1, "node is not a scalar");
    return *values(id);
  }

  std::span<const Real> grad_of(index id) const {
    const node& n = at(id);
    return {&grads_[n.grad], static_cast<std::size_t>(n.rows) * n.cols};
  }

  void backward(index root) {
    require(at(root).rows == 1 && at(root).cols == 1, "backward seed must be a scalar");
    grads_.assign(total_, Real(0));
    grads_[at(root).grad] = Real(1);
    for (index id = static_cast<index>(nodes_.size()) - 1; id >= 0; --id) {
      const node& n = nodes_[static_cast<std::size_t>(id)];
      const Real* g = &grads_[n.grad];
      switch (n.kind) {
        case op::leaf:
          break;
        case op::matvec: {
          const node& wn = at(n.a);
          const Real* wv = values(n.a);
          const Real* xv = values(n.b);
          Real* gw = &grads_[wn.grad];
          Real* gx = &grads_[at(n.b).grad];
          for (int r = 0; r < wn.rows; ++r) {
            const Real gr = g[r];
            if (gr == Real(0)) continue;
            const Real* row = wv + static_cast<std::size_t>(r) * wn.cols;
            Real* grow = gw + static_cast<std::size_t>(r) * wn.cols;
            for (int c = 0; c < wn.cols; ++c) {
              grow[c] += gr * xv[c];
              gx[c] += gr * row[c];
            }
          }
          break;
        }
        case op::add: {
          Real* ga = &grads_[at(n.a).grad];
          Real* gb = &grads_[at(n.b).grad];
          for (int i = 0; i < n.rows * n.cols; ++i) {
            ga[i] += g[i];
            gb[i] += g[i];
          }
          break;
        }
        case op::sub: {
          Real* ga = &grads_[at(n.a).grad];
          Real* gb = &grads_[at(n.b).grad];
          for (int i = 0; i < n.rows * n.cols; ++i) {
            ga[i] += g[i];
            gb[i] -= g[i];
          }
          break;
        }
        case op::tanh_: {
          Real* ga = &grads_[at(n.a).grad];
          const Real* y = &vals_[n.val];
          for (int i = 0; i < n.rows * n.cols; ++i) ga[i] += g[i] * (Real(1) - y[i] * y[i]);
          break;
        }
        case op::concat: {
          const node& an = at(n.a);
          Real* ga = &grads_[an.grad];
          Real* gb = &grads_[at(n.b).grad];
          for (int i = 0; i < an.rows; ++i) ga[i] += g[i];
          for (int i = 0; i < at(n.b).rows; ++i) gb[i] += g[an.rows + i];
          break;
        }
        case op::embed_mean: {
          const node& te = at(n.a);
          const node& pe = at(n.b);
          Real* gt = &grads_[te.grad];
          Real* gp = &grads_[pe.grad];
          const int m = n.naux;
          const Real inv = Real(1) / static_cast<Real>(m);
          for (int i = 0; i < m; ++i) {
            const int tok = aux_[static_cast<std::size_t>(n.aux + i)];
            Real* trow = gt + static_cast<std::size_t>(tok) * te.cols;
            Real* prow = gp + static_cast<std::size_t>(i) * pe.cols;
            for (int e = 0; e < te.cols; ++e) {
              const Real ge = g[e] * inv;
              trow[e] += ge;
              prow[e] += ge;
            }
          }
          break;
        }
        case op::cross_entropy: {
          const node& ln = at(n.a);
          const Real* x = values(n.a);
          Real* gx = &grads_[ln.grad];
          Real mx = x[0];
          for (int i = 1; i < ln.rows; ++i) mx = std::max(mx, x[i]);
          Real s = 0;
          for (int i = 0; i < ln.rows; ++i) s += std::exp(x[i] - mx);
          const Real g0 = g[0];
          for (int i = 0; i < ln.rows; ++i) {
            const Real p = std::exp(x[i] - mx) / s;
            gx[i] += g0 * (p - (i == n.tag ? Real(1) : Real(0)));
          }
          break;
        }
        case op::add_scalar: {
          Real* ga = &grads_[at(n.a).grad];
          for (int i = 0; i < n.rows * n.cols; ++i) ga[i] += g[i];
          break;
        }
        case op::scale: {
          Real* ga = &grads_[at(n.a).grad];
          for (int i = 0; i < n.rows * n.cols; ++i) ga[i] += g[i] * n.c;
          break;
        }
        case op::hinge: {
          Real* ga = &grads_[at(n.a).grad];
          const Real* x = values(n.a);
          for (int i = 0; i < n.rows * n.cols; ++i)
            if (x[i] > 0) ga[i] += g[i];
          break;
        }
        case op::sum_: {
          const Real g0 = g[0];
          for (int i = 0; i < n.naux; ++i) {
            const index p = aux_[static_cast<std::size_t>(n.aux + i)];
            grads_[at(p).grad] += g0;
          }
          break;
        }
        case op::sqdist: {
          const Real* av = values(n.a);
          const Real* bv = values(n.b);
          Real* ga = &grads_[at(n.a).grad];
          Real* gb = &grads_[at(n.b).grad];
          const Real g0 = g[0];
          for (int i = 0; i < at(n.a).rows; ++i) {
            const Real d = Real(2) * (av[i] - bv[i]) * g0;
            ga[i] += d;
            gb[i] -= d;
          }
          break;
        }
      }
    }
  }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class op : std::uint8_t {
    leaf,
    matvec,
    add,
    sub,
    tanh_,
    concat,
    embed_mean,
    cross_entropy,
    add_scalar,
    scale,
    hinge,
    sum_,
    sqdist
  };

  struct node {
    op kind = op::leaf;
    index a = -1, b = -1;
    int rows = 0, cols = 0;
    std::size_t val = 0;
    std::size_t grad = 0;
    const Real* ext = nullptr;
    int aux = -1, naux = 0;
    int tag = -1;  // cross-entropy target
    Real c = 0;
  };

  index alloc(op kind, int rows, int cols, index a = -1, index b = -1) {
    node n;
    n.kind = kind;
    n.a = a;
    n.b = b;
    n.rows = rows;
    n.cols = cols;
    n.val = vals_.size();
    n.grad = total_;
    total_ += static_cast<std::size_t>(rows) * cols;
    vals_.resize(vals_.size() + static_cast<std::size_t>(rows) * cols);
    return push(n);
  }

  index push(node n) {
    nodes_.push_back(n);
    return static_cast<index>(nodes_.size()) - 1;
  }

  const node& at(index id) const { return nodes_[static_cast<std::size_t>(id)]; }

  Real* val_ptr(index id) { return &vals_[nodes_[static_cast<std::size_t>(id)].val]; }

  std::vector<node> nodes_;
  std::vector<Real> vals_;
  std::vector<Real> grads_;
  std::vector<int> aux_;
  std::size_t total_ = 0;  // grad slots
};

}  // namespace genret

#endif  // GENRET_TAPE_HPP
