// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgadapt/error.hpp"
#include "kgadapt/rng.hpp"

namespace kgadapt::ad {

namespace {

template <typename Real>
using NodePtr = std::shared_ptr<Node<Real>>;

template <typename Real>
using BackwardFn = std::function<void(Node<Real>&)>;

// Wires a result node. History is kept only when some input needs grads, so
// no-grad (eval) forwards free intermediates as they go.
template <typename Real>
Tensor<Real> make_result(Shape shape, std::vector<Real> value, std::initializer_list<const Tensor<Real>*> inputs,
                         BackwardFn<Real> backward) {
  auto node = std::make_shared<Node<Real>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  bool needs = false;
  if (grad_enabled())
    for (const auto* t : inputs) needs = needs || t->requires_grad();
  if (needs) {
    node->requires_grad = true;
    for (const auto* t : inputs) node->parents.push_back(t->node());
    node->backward = std::move(backward);
  }
  return Tensor<Real>(std::move(node));
}

template <typename Real>
Tensor<Real> make_result_n(Shape shape, std::vector<Real> value, const std::vector<Tensor<Real>>& inputs,
                           BackwardFn<Real> backward) {
  auto node = std::make_shared<Node<Real>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  const bool needs = grad_enabled() &&
                     std::any_of(inputs.begin(), inputs.end(), [](const auto& t) { return t.requires_grad(); });
  if (needs) {
    node->requires_grad = true;
    for (const auto& t : inputs) node->parents.push_back(t.node());
    node->backward = std::move(backward);
  }
  return Tensor<Real>(std::move(node));
}

// Grad buffer of parent i, or nullptr when that parent is not tracked.
template <typename Real>
Real* parent_grad(Node<Real>& self, std::size_t i) {
  Node<Real>& p = *self.parents[i];
  return p.requires_grad ? p.ensure_grad().data() : nullptr;
}

void require_rank(const char* op, const Shape& s, std::size_t rank) {
  if (s.size() != rank)
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " + shape_str(s));
}

void require_axis(const char* op, const Shape& s, std::size_t axis) {
  if (axis >= s.size())
    throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) + " out of range for shape " + shape_str(s));
}

struct AxisSplit {
  std::size_t outer = 1, len = 1, inner = 1;
};

AxisSplit split_axis(const Shape& s, std::size_t axis) {
  AxisSplit a;
  for (std::size_t i = 0; i < axis; ++i) a.outer *= s[i];
  a.len = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) a.inner *= s[i];
  return a;
}

// C[m x n] += A[m x k] B[k x n]
template <typename Real>
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const Real* a, const Real* b, Real* c) {
  for (std::size_t i = 0; i < m; ++i) {
    Real* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const Real av = a[i * k + p];
      const Real* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// C[m x n] += A[m x k] B[n x k]^T
template <typename Real>
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const Real* a, const Real* b, Real* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const Real* ai = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const Real* bj = b + j * k;
      Real acc = 0;
      for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
      c[i * n + j] += acc;
    }
  }
}

// C[k x n] += A[m x k]^T B[m x n]
template <typename Real>
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const Real* a, const Real* b, Real* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const Real* bi = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const Real av = a[i * k + p];
      Real* cp = c + p * n;
      for (std::size_t j = 0; j < n; ++j) cp[j] += av * bi[j];
    }
  }
}

struct Broadcast {
  Shape out;
  std::vector<std::size_t> a_stride, b_stride;  // 0 on broadcast dims
  bool same = false;
};

Broadcast broadcast(const char* op, const Shape& a, const Shape& b) {
  if (a.size() != b.size())
    throw ShapeError(std::string(op) + ": rank mismatch " + shape_str(a) + " vs " + shape_str(b));
  Broadcast br;
  br.same = a == b;
  const std::size_t r = a.size();
  br.out.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    if (a[i] != b[i] && a[i] != 1 && b[i] != 1)
      throw ShapeError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) + " do not broadcast");
    br.out[i] = std::max(a[i], b[i]);
  }
  br.a_stride.assign(r, 0);
  br.b_stride.assign(r, 0);
  std::size_t sa = 1, sb = 1;
  for (std::size_t i = r; i-- > 0;) {
    br.a_stride[i] = a[i] == 1 ? 0 : sa;
    br.b_stride[i] = b[i] == 1 ? 0 : sb;
    sa *= a[i];
    sb *= b[i];
  }
  return br;
}

// Calls fn(out_index, a_index, b_index) in row-major order.
template <typename Fn>
void for_each_broadcast(const Broadcast& br, Fn&& fn) {
  const std::size_t total = numel(br.out);
  if (br.same) {
    for (std::size_t i = 0; i < total; ++i) fn(i, i, i);
    return;
  }
  const std::size_t r = br.out.size();
  if (r == 0) {
    fn(0, 0, 0);
    return;
  }
  std::vector<std::size_t> idx(r, 0);
  std::size_t ia = 0, ib = 0;
  const std::size_t last = br.out[r - 1];
  for (std::size_t o = 0; o < total; o += last) {
    for (std::size_t j = 0; j < last; ++j) fn(o + j, ia + j * br.a_stride[r - 1], ib + j * br.b_stride[r - 1]);
    // advance the odometer over the leading dims
    for (std::size_t d = r - 1; d-- > 0;) {
      ++idx[d];
      ia += br.a_stride[d];
      ib += br.b_stride[d];
      if (idx[d] < br.out[d]) break;
      ia -= br.a_stride[d] * idx[d];
      ib -= br.b_stride[d] * idx[d];
      idx[d] = 0;
    }
  }
}

enum class BinOp { Add, Sub, Mul };

template <typename Real>
Tensor<Real> binary(const char* name, BinOp op, const Tensor<Real>& a, const Tensor<Real>& b) {
  Broadcast br = broadcast(name, a.shape(), b.shape());
  std::vector<Real> out(numel(br.out));
  const Real* av = a.data().data();
  const Real* bv = b.data().data();
  for_each_broadcast(br, [&](std::size_t o, std::size_t ia, std::size_t ib) {
    switch (op) {
      case BinOp::Add: out[o] = av[ia] + bv[ib]; break;
      case BinOp::Sub: out[o] = av[ia] - bv[ib]; break;
      case BinOp::Mul: out[o] = av[ia] * bv[ib]; break;
    }
  });
  Shape shape = br.out;
  return make_result<Real>(std::move(shape), std::move(out), {&a, &b}, [br, op](Node<Real>& self) {
    Real* ga = parent_grad(self, 0);
    Real* gb = parent_grad(self, 1);
    const Real* g = self.grad.data();
    const Real* av = self.parents[0]->value.data();
    const Real* bv = self.parents[1]->value.data();
    for_each_broadcast(br, [&](std::size_t o, std::size_t ia, std::size_t ib) {
      switch (op) {
        case BinOp::Add:
          if (ga) ga[ia] += g[o];
          if (gb) gb[ib] += g[o];
          break;
        case BinOp::Sub:
          if (ga) ga[ia] += g[o];
          if (gb) gb[ib] -= g[o];
          break;
        case BinOp::Mul:
          if (ga) ga[ia] += g[o] * bv[ib];
          if (gb) gb[ib] += g[o] * av[ia];
          break;
      }
    });
  });
}

}  // namespace

template <typename Real>
Tensor<Real> matmul(const Tensor<Real>& a, const Tensor<Real>& b) {
  require_rank("matmul", a.shape(), 2);
  require_rank("matmul", b.shape(), 2);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k)
    throw ShapeError("matmul: inner dimensions differ: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  std::vector<Real> out(m * n, Real(0));
  gemm_nn(m, n, k, a.data().data(), b.data().data(), out.data());
  return make_result<Real>({m, n}, std::move(out), {&a, &b}, [m, n, k](Node<Real>& self) {
    const Real* g = self.grad.data();
    if (Real* ga = parent_grad(self, 0)) gemm_nt(m, k, n, g, self.parents[1]->value.data(), ga);
    if (Real* gb = parent_grad(self, 1)) gemm_tn(m, n, k, self.parents[0]->value.data(), g, gb);
  });
}

template <typename Real>
Tensor<Real> matmul_nt(const Tensor<Real>& a, const Tensor<Real>& b) {
  require_rank("matmul_nt", a.shape(), 2);
  require_rank("matmul_nt", b.shape(), 2);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  if (b.dim(1) != k)
    throw ShapeError("matmul_nt: inner dimensions differ: " + shape_str(a.shape()) + " x " + shape_str(b.shape()) + "^T");
  std::vector<Real> out(m * n, Real(0));
  gemm_nt(m, n, k, a.data().data(), b.data().data(), out.data());
  return make_result<Real>({m, n}, std::move(out), {&a, &b}, [m, n, k](Node<Real>& self) {
    const Real* g = self.grad.data();
    if (Real* ga = parent_grad(self, 0)) gemm_nn(m, k, n, g, self.parents[1]->value.data(), ga);
    if (Real* gb = parent_grad(self, 1)) gemm_tn(m, k, n, g, self.parents[0]->value.data(), gb);
  });
}

template <typename Real>
Tensor<Real> transpose(const Tensor<Real>& a) {
  require_rank("transpose", a.shape(), 2);
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<Real> out(m * n);
  const Real* av = a.data().data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = av[i * n + j];
  return make_result<Real>({n, m}, std::move(out), {&a}, [m, n](Node<Real>& self) {
    Real* ga = parent_grad(self, 0);
    const Real* g = self.grad.data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j * m + i];
  });
}

template <typename Real>
Tensor<Real> add(const Tensor<Real>& a, const Tensor<Real>& b) {
  return binary("add", BinOp::Add, a, b);
}

template <typename Real>
Tensor<Real> sub(const Tensor<Real>& a, const Tensor<Real>& b) {
  return binary("sub", BinOp::Sub, a, b);
}

template <typename Real>
Tensor<Real> mul(const Tensor<Real>& a, const Tensor<Real>& b) {
  return binary("mul", BinOp::Mul, a, b);
}

template <typename Real>
Tensor<Real> scale(const Tensor<Real>& a, Real factor) {
  std::vector<Real> out(a.data().begin(), a.data().end());
  for (auto& v : out) v *= factor;
  return make_result<Real>(a.shape(), std::move(out), {&a}, [factor](Node<Real>& self) {
    Real* ga = parent_grad(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += factor * self.grad[i];
  });
}

template <typename Real>
Tensor<Real> relu(const Tensor<Real>& x) {
  std::vector<Real> out(x.data().begin(), x.data().end());
  for (auto& v : out) v = v > Real(0) ? v : Real(0);
  return make_result<Real>(x.shape(), std::move(out), {&x}, [](Node<Real>& self) {
    Real* gx = parent_grad(self, 0);
    const Real* xv = self.parents[0]->value.data();
    // Subgradient 0 at the kink.
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if (xv[i] > Real(0)) gx[i] += self.grad[i];
  });
}

template <typename Real>
Tensor<Real> gelu(const Tensor<Real>& x) {
  const auto xs = x.data();
  std::vector<Real> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = xs[i];
    out[i] = static_cast<Real>(0.5 * v * (1.0 + std::erf(v * M_SQRT1_2)));
  }
  return make_result<Real>(x.shape(), std::move(out), {&x}, [](Node<Real>& self) {
    Real* gx = parent_grad(self, 0);
    const Real* xv = self.parents[0]->value.data();
    constexpr double kInvSqrt2Pi = 0.3989422804014327;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const double v = xv[i];
      const double cdf = 0.5 * (1.0 + std::erf(v * M_SQRT1_2));
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
      gx[i] += static_cast<Real>(self.grad[i] * (cdf + v * pdf));
    }
  });
}

template <typename Real>
Tensor<Real> softmax(const Tensor<Real>& x, std::size_t axis) {
  require_axis("softmax", x.shape(), axis);
  const AxisSplit s = split_axis(x.shape(), axis);
  const Real* xv = x.data().data();
  std::vector<Real> out(x.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.len * s.inner + in;
      Real mx = -std::numeric_limits<Real>::infinity();
      for (std::size_t l = 0; l < s.len; ++l) mx = std::max(mx, xv[base + l * s.inner]);
      double total = 0;
      for (std::size_t l = 0; l < s.len; ++l) {
        const double e = std::exp(static_cast<double>(xv[base + l * s.inner] - mx));
        out[base + l * s.inner] = static_cast<Real>(e);
        total += e;
      }
      for (std::size_t l = 0; l < s.len; ++l)
        out[base + l * s.inner] = static_cast<Real>(out[base + l * s.inner] / total);
    }
  }
  return make_result<Real>(x.shape(), std::move(out), {&x}, [s](Node<Real>& self) {
    Real* gx = parent_grad(self, 0);
    const Real* y = self.value.data();
    const Real* g = self.grad.data();
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t in = 0; in < s.inner; ++in) {
        const std::size_t base = o * s.len * s.inner + in;
        double dot = 0;
        for (std::size_t l = 0; l < s.len; ++l) dot += static_cast<double>(g[base + l * s.inner]) * y[base + l * s.inner];
        for (std::size_t l = 0; l < s.len; ++l) {
          const std::size_t i = base + l * s.inner;
          gx[i] += static_cast<Real>(y[i] * (g[i] - dot));
        }
      }
    }
  });
}

template <typename Real>
Tensor<Real> layer_norm(const Tensor<Real>& x, std::size_t axis, const Tensor<Real>& gamma, const Tensor<Real>& beta,
                        double eps) {
  require_axis("layer_norm", x.shape(), axis);
  const AxisSplit s = split_axis(x.shape(), axis);
  if (gamma.size() != s.len || beta.size() != s.len)
    throw ShapeError("layer_norm: gamma " + shape_str(gamma.shape()) + " / beta " + shape_str(beta.shape()) +
                     " must have " + std::to_string(s.len) + " elements for input " + shape_str(x.shape()));
  const Real* xv = x.data().data();
  const Real* gv = gamma.data().data();
  const Real* bv = beta.data().data();
  std::vector<Real> out(x.size());
  std::vector<Real> xhat(x.size());
  std::vector<Real> rstd(s.outer * s.inner);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.len * s.inner + in;
      double mu = 0;
      for (std::size_t l = 0; l < s.len; ++l) mu += xv[base + l * s.inner];
      mu /= static_cast<double>(s.len);
      double var = 0;
      for (std::size_t l = 0; l < s.len; ++l) {
        const double d = xv[base + l * s.inner] - mu;
        var += d * d;
      }
      var /= static_cast<double>(s.len);
      const double r = 1.0 / std::sqrt(var + eps);
      rstd[o * s.inner + in] = static_cast<Real>(r);
      for (std::size_t l = 0; l < s.len; ++l) {
        const std::size_t i = base + l * s.inner;
        xhat[i] = static_cast<Real>((xv[i] - mu) * r);
        out[i] = gv[l] * xhat[i] + bv[l];
      }
    }
  }
  return make_result<Real>(
      x.shape(), std::move(out), {&x, &gamma, &beta},
      [s, xhat = std::move(xhat), rstd = std::move(rstd)](Node<Real>& self) {
        Real* gx = parent_grad(self, 0);
        Real* ggamma = parent_grad(self, 1);
        Real* gbeta = parent_grad(self, 2);
        const Real* gv = self.parents[1]->value.data();
        const Real* g = self.grad.data();
        for (std::size_t o = 0; o < s.outer; ++o) {
          for (std::size_t in = 0; in < s.inner; ++in) {
            const std::size_t base = o * s.len * s.inner + in;
            double mean_d = 0, mean_dx = 0;
            for (std::size_t l = 0; l < s.len; ++l) {
              const std::size_t i = base + l * s.inner;
              const double d = static_cast<double>(g[i]) * gv[l];
              mean_d += d;
              mean_dx += d * xhat[i];
              if (ggamma) ggamma[l] += g[i] * xhat[i];
              if (gbeta) gbeta[l] += g[i];
            }
            if (!gx) continue;
            mean_d /= static_cast<double>(s.len);
            mean_dx /= static_cast<double>(s.len);
            const double r = rstd[o * s.inner + in];
            for (std::size_t l = 0; l < s.len; ++l) {
              const std::size_t i = base + l * s.inner;
              const double d = static_cast<double>(g[i]) * gv[l];
              gx[i] += static_cast<Real>(r * (d - mean_d - xhat[i] * mean_dx));
            }
          }
        }
      });
}

template <typename Real>
Tensor<Real> embedding_lookup(const Tensor<Real>& table, std::span<const std::int32_t> ids) {
  require_rank("embedding_lookup", table.shape(), 2);
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  std::vector<Real> out(ids.size() * d);
  const Real* tv = table.data().data();
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || static_cast<std::size_t>(ids[r]) >= vocab)
      throw ShapeError("embedding_lookup: id " + std::to_string(ids[r]) + " outside table " + shape_str(table.shape()));
    std::copy_n(tv + static_cast<std::size_t>(ids[r]) * d, d, out.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  std::vector<std::int32_t> kept(ids.begin(), ids.end());
  return make_result<Real>({ids.size(), d}, std::move(out), {&table}, [d, kept = std::move(kept)](Node<Real>& self) {
    Real* gt = parent_grad(self, 0);
    const Real* g = self.grad.data();
    for (std::size_t r = 0; r < kept.size(); ++r) {
      Real* row = gt + static_cast<std::size_t>(kept[r]) * d;
      for (std::size_t j = 0; j < d; ++j) row[j] += g[r * d + j];
    }
  });
}

template <typename Real>
Tensor<Real> dropout(const Tensor<Real>& x, double p, std::uint64_t seed, bool training) {
  if (!training || p <= 0.0) return x;
  if (p >= 1.0) throw ShapeError("dropout: p must be below 1");
  const Real keep_scale = static_cast<Real>(1.0 / (1.0 - p));
  std::vector<Real> mask(x.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double u = static_cast<double>(mix64(seed ^ mix64(i)) >> 11) * 0x1.0p-53;
    mask[i] = u >= p ? keep_scale : Real(0);
  }
  std::vector<Real> out(x.data().begin(), x.data().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return make_result<Real>(x.shape(), std::move(out), {&x}, [mask = std::move(mask)](Node<Real>& self) {
    Real* gx = parent_grad(self, 0);
    for (std::size_t i = 0; i < mask.size(); ++i) gx[i] += self.grad[i] * mask[i];
  });
}

template <typename Real>
Tensor<Real> cross_entropy(const Tensor<Real>& logits, std::span<const std::int32_t> labels) {
  require_rank("cross_entropy", logits.shape(), 2);
  const std::size_t n = logits.dim(0), c = logits.dim(1);
  if (labels.size() != n)
    throw ShapeError("cross_entropy: " + std::to_string(labels.size()) + " labels for logits " +
                     shape_str(logits.shape()));
  std::size_t count = 0;
  for (auto l : labels) {
    if (l == kIgnoreIndex) continue;
    if (l < 0 || static_cast<std::size_t>(l) >= c)
      throw ShapeError("cross_entropy: label " + std::to_string(l) + " outside " + std::to_string(c) + " classes");
    ++count;
  }
  if (count == 0) throw NoSupervisedPositions();
  const Real* lv = logits.data().data();
  std::vector<Real> probs(n * c, Real(0));
  double total = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (labels[r] == kIgnoreIndex) continue;
    const Real* row = lv + r * c;
    const double mx = *std::max_element(row, row + c);
    double z = 0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    for (std::size_t j = 0; j < c; ++j) probs[r * c + j] = static_cast<Real>(std::exp(row[j] - mx) / z);
    total += -(row[labels[r]] - mx - std::log(z));
  }
  const double inv = 1.0 / static_cast<double>(count);
  std::vector<std::int32_t> kept(labels.begin(), labels.end());
  return make_result<Real>(Shape{}, {static_cast<Real>(total * inv)}, {&logits},
                           [n, c, inv, probs = std::move(probs), kept = std::move(kept)](Node<Real>& self) {
                             Real* gl = parent_grad(self, 0);
                             const double g = self.grad[0] * inv;
                             for (std::size_t r = 0; r < n; ++r) {
                               if (kept[r] == kIgnoreIndex) continue;
                               for (std::size_t j = 0; j < c; ++j) {
                                 const double t = (static_cast<std::int32_t>(j) == kept[r]) ? 1.0 : 0.0;
                                 gl[r * c + j] += static_cast<Real>(g * (probs[r * c + j] - t));
                               }
                             }
                           });
}

template <typename Real>
Tensor<Real> sum(const Tensor<Real>& x) {
  double total = 0;
  for (Real v : x.data()) total += v;
  return make_result<Real>(Shape{}, {static_cast<Real>(total)}, {&x}, [](Node<Real>& self) {
    Real* gx = parent_grad(self, 0);
    const std::size_t n = self.parents[0]->value.size();
    for (std::size_t i = 0; i < n; ++i) gx[i] += self.grad[0];
  });
}

template <typename Real>
Tensor<Real> mean(const Tensor<Real>& x) {
  return scale(sum(x), static_cast<Real>(1.0 / static_cast<double>(x.size())));
}

template <typename Real>
Tensor<Real> sum_axis(const Tensor<Real>& x, std::size_t axis) {
  require_axis("sum_axis", x.shape(), axis);
  const AxisSplit s = split_axis(x.shape(), axis);
  Shape shape = x.shape();
  shape[axis] = 1;
  std::vector<Real> out(s.outer * s.inner, Real(0));
  const Real* xv = x.data().data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t l = 0; l < s.len; ++l)
      for (std::size_t in = 0; in < s.inner; ++in) out[o * s.inner + in] += xv[(o * s.len + l) * s.inner + in];
  return make_result<Real>(std::move(shape), std::move(out), {&x}, [s](Node<Real>& self) {
    Real* gx = parent_grad(self, 0);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t l = 0; l < s.len; ++l)
        for (std::size_t in = 0; in < s.inner; ++in) gx[(o * s.len + l) * s.inner + in] += self.grad[o * s.inner + in];
  });
}

template <typename Real>
Tensor<Real> slice(const Tensor<Real>& x, std::size_t axis, std::size_t start, std::size_t length) {
  require_axis("slice", x.shape(), axis);
  const AxisSplit s = split_axis(x.shape(), axis);
  if (start + length > s.len)
    throw ShapeError("slice: [" + std::to_string(start) + ", " + std::to_string(start + length) + ") exceeds axis " +
                     std::to_string(axis) + " of " + shape_str(x.shape()));
  Shape shape = x.shape();
  shape[axis] = length;
  std::vector<Real> out(s.outer * length * s.inner);
  const Real* xv = x.data().data();
  for (std::size_t o = 0; o < s.outer; ++o)
    std::copy_n(xv + (o * s.len + start) * s.inner, length * s.inner, out.begin() + static_cast<std::ptrdiff_t>(o * length * s.inner));
  return make_result<Real>(std::move(shape), std::move(out), {&x}, [s, start, length](Node<Real>& self) {
    Real* gx = parent_grad(self, 0);
    for (std::size_t o = 0; o < s.outer; ++o) {
      Real* dst = gx + (o * s.len + start) * s.inner;
      const Real* src = self.grad.data() + o * length * s.inner;
      for (std::size_t i = 0; i < length * s.inner; ++i) dst[i] += src[i];
    }
  });
}

template <typename Real>
Tensor<Real> concat(const std::vector<Tensor<Real>>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& first = parts.front().shape();
  require_axis("concat", first, axis);
  Shape shape = first;
  shape[axis] = 0;
  for (const auto& p : parts) {
    Shape a = p.shape(), b = first;
    if (a.size() != b.size()) throw ShapeError("concat: rank mismatch " + shape_str(a) + " vs " + shape_str(b));
    a[axis] = b[axis] = 0;
    if (a != b) throw ShapeError("concat: shapes " + shape_str(p.shape()) + " and " + shape_str(first) + " differ off-axis");
    shape[axis] += p.dim(axis);
  }
  const AxisSplit out_s = split_axis(shape, axis);
  std::vector<Real> out(numel(shape));
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    offsets.push_back(offset);
    const std::size_t len = p.dim(axis);
    const Real* pv = p.data().data();
    for (std::size_t o = 0; o < out_s.outer; ++o)
      std::copy_n(pv + o * len * out_s.inner, len * out_s.inner,
                  out.begin() + static_cast<std::ptrdiff_t>((o * out_s.len + offset) * out_s.inner));
    offset += len;
  }
  return make_result_n<Real>(std::move(shape), std::move(out), parts, [out_s, offsets, axis](Node<Real>& self) {
    for (std::size_t k = 0; k < self.parents.size(); ++k) {
      Real* gp = parent_grad(self, k);
      if (!gp) continue;
      const std::size_t len = self.parents[k]->shape[axis];
      for (std::size_t o = 0; o < out_s.outer; ++o) {
        const Real* src = self.grad.data() + (o * out_s.len + offsets[k]) * out_s.inner;
        Real* dst = gp + o * len * out_s.inner;
        for (std::size_t i = 0; i < len * out_s.inner; ++i) dst[i] += src[i];
      }
    }
  });
}

template <typename Real>
Tensor<Real> gather_rows(const Tensor<Real>& x, std::span<const std::size_t> rows) {
  require_rank("gather_rows", x.shape(), 2);
  const std::size_t n = x.dim(0), d = x.dim(1);
  std::vector<Real> out(rows.size() * d);
  const Real* xv = x.data().data();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= n) throw ShapeError("gather_rows: row " + std::to_string(rows[r]) + " outside " + shape_str(x.shape()));
    std::copy_n(xv + rows[r] * d, d, out.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  std::vector<std::size_t> kept(rows.begin(), rows.end());
  return make_result<Real>({rows.size(), d}, std::move(out), {&x}, [d, kept = std::move(kept)](Node<Real>& self) {
    Real* gx = parent_grad(self, 0);
    for (std::size_t r = 0; r < kept.size(); ++r)
      for (std::size_t j = 0; j < d; ++j) gx[kept[r] * d + j] += self.grad[r * d + j];
  });
}

template <typename Real>
Tensor<Real> reshape(const Tensor<Real>& x, Shape shape) {
  if (numel(shape) != x.size())
    throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  std::vector<Real> out(x.data().begin(), x.data().end());
  return make_result<Real>(std::move(shape), std::move(out), {&x}, [](Node<Real>& self) {
    Real* gx = parent_grad(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i) gx[i] += self.grad[i];
  });
}

#define KGADAPT_INSTANTIATE_OPS(R)                                                                        \
  template Tensor<R> matmul<R>(const Tensor<R>&, const Tensor<R>&);                                       \
  template Tensor<R> matmul_nt<R>(const Tensor<R>&, const Tensor<R>&);                                    \
  template Tensor<R> transpose<R>(const Tensor<R>&);                                                      \
  template Tensor<R> add<R>(const Tensor<R>&, const Tensor<R>&);                                          \
  template Tensor<R> sub<R>(const Tensor<R>&, const Tensor<R>&);                                          \
  template Tensor<R> mul<R>(const Tensor<R>&, const Tensor<R>&);                                          \
  template Tensor<R> scale<R>(const Tensor<R>&, R);                                                       \
  template Tensor<R> relu<R>(const Tensor<R>&);                                                           \
  template Tensor<R> gelu<R>(const Tensor<R>&);                                                           \
  template Tensor<R> softmax<R>(const Tensor<R>&, std::size_t);                                           \
  template Tensor<R> layer_norm<R>(const Tensor<R>&, std::size_t, const Tensor<R>&, const Tensor<R>&, double); \
  template Tensor<R> embedding_lookup<R>(const Tensor<R>&, std::span<const std::int32_t>);                \
  template Tensor<R> dropout<R>(const Tensor<R>&, double, std::uint64_t, bool);                           \
  template Tensor<R> cross_entropy<R>(const Tensor<R>&, std::span<const std::int32_t>);                   \
  template Tensor<R> sum<R>(const Tensor<R>&);                                                            \
  template Tensor<R> mean<R>(const Tensor<R>&);                                                           \
  template Tensor<R> sum_axis<R>(const Tensor<R>&, std::size_t);                                          \
  template Tensor<R> slice<R>(const Tensor<R>&, std::size_t, std::size_t, std::size_t);                   \
  template Tensor<R> concat<R>(const std::vector<Tensor<R>>&, std::size_t);                               \
  template Tensor<R> gather_rows<R>(const Tensor<R>&, std::span<const std::size_t>);                      \
  template Tensor<R> reshape<R>(const Tensor<R>&, Shape);

KGADAPT_INSTANTIATE_OPS(float)
KGADAPT_INSTANTIATE_OPS(double)

#undef KGADAPT_INSTANTIATE_OPS

}  // namespace kgadapt::ad
