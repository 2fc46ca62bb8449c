// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kgadapt/autodiff/tensor.hpp"

namespace kgadapt::ad {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename Real>
struct AdamState {
  AdamHyper hyper;
  std::vector<std::vector<Real>> m;  // first moments, one buffer per parameter
  std::vector<std::vector<Real>> v;  // second moments
  std::uint64_t t = 0;

  AdamState() = default;
  AdamState(std::span<const Tensor<Real>> params, AdamHyper h);
};

/// One bias-corrected Adam update. `grads[i]` may be empty, meaning a zero
/// gradient. Throws ShapeError when buffers and parameters disagree.
template <typename Real>
void adam_step(std::span<Tensor<Real>> params, std::span<const std::span<const Real>> grads, AdamState<Real>& state);

/// Same, reading each parameter's own grad buffer.
template <typename Real>
void adam_step(std::span<Tensor<Real>> params, AdamState<Real>& state);

extern template struct AdamState<float>;
extern template struct AdamState<double>;

}  // namespace kgadapt::ad
