// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/autodiff/adam.hpp"

#include <cmath>

#include "kgadapt/error.hpp"

namespace kgadapt::ad {

template <typename Real>
AdamState<Real>::AdamState(std::span<const Tensor<Real>> params, AdamHyper h) : hyper(h) {
  for (const auto& p : params) {
    m.emplace_back(p.size(), Real(0));
    v.emplace_back(p.size(), Real(0));
  }
}

template <typename Real>
void adam_step(std::span<Tensor<Real>> params, std::span<const std::span<const Real>> grads, AdamState<Real>& state) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " params, " + std::to_string(grads.size()) +
                     " grads, " + std::to_string(state.m.size()) + " moment buffers");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].size() != params[i].size() || (!grads[i].empty() && grads[i].size() != params[i].size()))
      throw ShapeError("adam_step: parameter " + std::to_string(i) + " has shape " + shape_str(params[i].shape()) +
                       " but its moment/grad buffers hold " + std::to_string(state.m[i].size()) + "/" +
                       std::to_string(grads[i].size()) + " values");
  }
  ++state.t;
  const auto& h = state.hyper;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto data = params[i].mutable_data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto g = grads[i];
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double gk = g.empty() ? 0.0 : static_cast<double>(g[k]);
      const double mk = h.beta1 * m[k] + (1.0 - h.beta1) * gk;
      const double vk = h.beta2 * v[k] + (1.0 - h.beta2) * gk * gk;
      m[k] = static_cast<Real>(mk);
      v[k] = static_cast<Real>(vk);
      const double update = h.lr * (mk / c1) / (std::sqrt(vk / c2) + h.eps);
      data[k] = static_cast<Real>(data[k] - update);
    }
  }
}

template <typename Real>
void adam_step(std::span<Tensor<Real>> params, AdamState<Real>& state) {
  std::vector<std::span<const Real>> grads;
  grads.reserve(params.size());
  for (const auto& p : params) grads.push_back(p.grad());
  adam_step<Real>(params, grads, state);
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(std::span<Tensor<float>>, std::span<const std::span<const float>>, AdamState<float>&);
template void adam_step<double>(std::span<Tensor<double>>, std::span<const std::span<const double>>, AdamState<double>&);
template void adam_step<float>(std::span<Tensor<float>>, AdamState<float>&);
template void adam_step<double>(std::span<Tensor<double>>, AdamState<double>&);

}  // namespace kgadapt::ad
