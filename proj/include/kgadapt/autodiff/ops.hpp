// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kgadapt/autodiff/tensor.hpp"

namespace kgadapt::ad {

inline constexpr std::int32_t kIgnoreIndex = -100;

/// [m x k] . [k x n]
template <typename Real>
Tensor<Real> matmul(const Tensor<Real>& a, const Tensor<Real>& b);

/// [m x k] . [n x k]^T, without materializing the transpose.
template <typename Real>
Tensor<Real> matmul_nt(const Tensor<Real>& a, const Tensor<Real>& b);

template <typename Real>
Tensor<Real> transpose(const Tensor<Real>& a);

// Elementwise with broadcasting: equal ranks, each dim equal or 1.
template <typename Real>
Tensor<Real> add(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real>
Tensor<Real> sub(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real>
Tensor<Real> mul(const Tensor<Real>& a, const Tensor<Real>& b);

template <typename Real>
Tensor<Real> scale(const Tensor<Real>& a, Real factor);

template <typename Real>
Tensor<Real> relu(const Tensor<Real>& x);

/// Exact erf form.
template <typename Real>
Tensor<Real> gelu(const Tensor<Real>& x);

template <typename Real>
Tensor<Real> softmax(const Tensor<Real>& x, std::size_t axis);

/// Normalizes along `axis`; gamma and beta have shape [x.dim(axis)].
template <typename Real>
Tensor<Real> layer_norm(const Tensor<Real>& x, std::size_t axis, const Tensor<Real>& gamma,
                        const Tensor<Real>& beta, double eps = 1e-5);

/// Rows of a [vocab x d] table.
template <typename Real>
Tensor<Real> embedding_lookup(const Tensor<Real>& table, std::span<const std::int32_t> ids);

/// Inverted dropout. The keep mask is a pure function of (seed, element
/// index), so a step can be replayed. Identity when p == 0 or !training.
template <typename Real>
Tensor<Real> dropout(const Tensor<Real>& x, double p, std::uint64_t seed, bool training);

/// Mean negative log-likelihood over rows whose label is not kIgnoreIndex.
/// Throws NoSupervisedPositions when every label is ignored.
template <typename Real>
Tensor<Real> cross_entropy(const Tensor<Real>& logits, std::span<const std::int32_t> labels);

template <typename Real>
Tensor<Real> sum(const Tensor<Real>& x);
template <typename Real>
Tensor<Real> mean(const Tensor<Real>& x);

/// Sum along `axis`, keeping it with size 1.
template <typename Real>
Tensor<Real> sum_axis(const Tensor<Real>& x, std::size_t axis);

template <typename Real>
Tensor<Real> slice(const Tensor<Real>& x, std::size_t axis, std::size_t start, std::size_t length);

template <typename Real>
Tensor<Real> concat(const std::vector<Tensor<Real>>& parts, std::size_t axis);

/// Selected rows of a rank-2 tensor.
template <typename Real>
Tensor<Real> gather_rows(const Tensor<Real>& x, std::span<const std::size_t> rows);

template <typename Real>
Tensor<Real> reshape(const Tensor<Real>& x, Shape shape);

}  // namespace kgadapt::ad
