// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace kgadapt::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// False inside a NoGradGuard scope on this thread; ops then record no
/// history even when inputs require grads.
bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

template <typename Real>
struct Node {
  Shape shape;
  std::vector<Real> value;
  std::vector<Real> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  /// Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward;

  bool is_leaf() const { return !backward; }
  std::vector<Real>& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), Real(0));
    return grad;
  }
};

/// Dense row-major tensor with reverse-mode differentiation. A Tensor is a
/// shared handle: copies alias the same values and grad buffer. Values are
/// not modified by ops; only leaves are updated in place by optimizers.
template <typename Real>
class Tensor {
 public:
  using value_type = Real;

  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, Real value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<Real> values, bool requires_grad = false);
  static Tensor scalar(Real value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t size() const { return node_->value.size(); }

  std::span<const Real> data() const { return node_->value; }
  /// In-place access for leaves (initialization, optimizer steps, loading).
  std::span<Real> mutable_data() { return node_->value; }
  Real item() const;
  Real at(std::size_t i, std::size_t j) const { return node_->value[i * node_->shape.back() + j]; }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const Real> grad() const { return node_->grad; }
  void zero_grad() { node_->grad.clear(); }

  /// Populates grads of every requires_grad leaf reachable from this scalar.
  /// Leaf grads accumulate across calls until zero_grad().
  void backward() const;

  /// Same values, no graph history, grad tracking off.
  Tensor detach() const;
  /// Deep copy of the values into a fresh leaf with the same requires_grad.
  Tensor clone() const;

  const std::shared_ptr<Node<Real>>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<Node<Real>> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<Node<Real>> node_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace kgadapt::ad
