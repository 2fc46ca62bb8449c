// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

#include "kgadapt/autodiff/tensor.hpp"

namespace kgadapt::ad {

struct GradCheckResult {
  double max_rel_error = 0;
  double max_abs_error = 0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

/// Coordinate errors are |analytic - numeric| / max(|analytic|, |numeric|, floor);
/// the floor keeps exactly-zero gradients from dividing by zero.
inline constexpr double kGradCheckFloor = 1e-6;

/// Central differences of a scalar function of one tensor against backward().
template <typename Real>
GradCheckResult finite_diff_check(const std::function<Tensor<Real>(const Tensor<Real>&)>& f, const Tensor<Real>& x,
                                  double h = 1e-5, double floor = kGradCheckFloor);

/// Same for a parameter captured by `loss`; the parameter is perturbed in
/// place and restored. Its existing grad is cleared.
template <typename Real>
GradCheckResult finite_diff_check_param(const std::function<Tensor<Real>()>& loss, Tensor<Real> param,
                                        double h = 1e-5, double floor = kGradCheckFloor);

}  // namespace kgadapt::ad
