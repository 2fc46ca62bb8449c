// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace kgadapt::ad {

template <typename Real>
GradCheckResult finite_diff_check_param(const std::function<Tensor<Real>()>& loss, Tensor<Real> param, double h,
                                        double floor) {
  const bool tracked = param.requires_grad();
  param.set_requires_grad(true);
  param.zero_grad();
  loss().backward();
  std::vector<Real> analytic(param.grad().begin(), param.grad().end());
  if (analytic.empty()) analytic.assign(param.size(), Real(0));
  param.zero_grad();

  GradCheckResult res;
  auto data = param.mutable_data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Real saved = data[i];
    data[i] = static_cast<Real>(saved + h);
    const double up = loss().item();
    data[i] = static_cast<Real>(saved - h);
    const double down = loss().item();
    data[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[i];
    const double abs_err = std::abs(a - numeric);
    const double rel = abs_err / std::max({std::abs(a), std::abs(numeric), floor});
    if (rel > res.max_rel_error) {
      res.max_rel_error = rel;
      res.worst_index = i;
    }
    res.max_abs_error = std::max(res.max_abs_error, abs_err);
    ++res.checked;
  }
  param.set_requires_grad(tracked);
  return res;
}

template <typename Real>
GradCheckResult finite_diff_check(const std::function<Tensor<Real>(const Tensor<Real>&)>& f, const Tensor<Real>& x,
                                  double h, double floor) {
  Tensor<Real> leaf = Tensor<Real>::from(x.shape(), std::vector<Real>(x.data().begin(), x.data().end()), true);
  return finite_diff_check_param<Real>([&] { return f(leaf); }, leaf, h, floor);
}

template GradCheckResult finite_diff_check<float>(const std::function<Tensor<float>(const Tensor<float>&)>&,
                                                  const Tensor<float>&, double, double);
template GradCheckResult finite_diff_check<double>(const std::function<Tensor<double>(const Tensor<double>&)>&,
                                                   const Tensor<double>&, double, double);
template GradCheckResult finite_diff_check_param<float>(const std::function<Tensor<float>()>&, Tensor<float>, double,
                                                        double);
template GradCheckResult finite_diff_check_param<double>(const std::function<Tensor<double>()>&, Tensor<double>,
                                                         double, double);

}  // namespace kgadapt::ad
