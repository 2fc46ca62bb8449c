// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kgadapt/autodiff/tensor.hpp"
#include "kgadapt/model/config.hpp"

namespace kgadapt::model {

template <typename Real>
using NamedTensors = std::vector<std::pair<std::string, ad::Tensor<Real>>>;

template <typename Real>
struct EncoderLayerWeights {
  ad::Tensor<Real> ln1_gamma, ln1_beta;
  ad::Tensor<Real> w_q, b_q, w_k, b_k, w_v, b_v, w_o, b_o;
  ad::Tensor<Real> ln2_gamma, ln2_beta;
  ad::Tensor<Real> w_ff1, b_ff1, w_ff2, b_ff2;
};

/// The frozen backbone: embeddings, encoder layers, final norm, and the bias
/// of the MLM head whose projection is tied to the token embedding.
template <typename Real>
struct BaseWeights {
  EncoderConfig config;
  ad::Tensor<Real> token_embedding;     // [vocab x d]
  ad::Tensor<Real> position_embedding;  // [max_seq x d]
  std::vector<EncoderLayerWeights<Real>> layers;
  ad::Tensor<Real> final_ln_gamma, final_ln_beta;
  ad::Tensor<Real> mlm_bias;  // [1 x vocab]

  NamedTensors<Real> named() const;
};

template <typename Real>
struct AdapterLayerWeights {
  ad::Tensor<Real> w_down;  // [d x d/r]
  ad::Tensor<Real> b_down;  // [1 x d/r]
  ad::Tensor<Real> w_up;    // [d/r x d]
  ad::Tensor<Real> b_up;    // [1 x d]
};

/// One bottleneck adapter per encoder layer.
template <typename Real>
struct AdapterWeights {
  std::size_t d_model = 0;
  std::size_t reduction_factor = 16;
  std::vector<AdapterLayerWeights<Real>> layers;

  std::size_t bottleneck() const { return d_model / reduction_factor; }
  NamedTensors<Real> named() const;
};

template <typename Real>
struct FusionLayerWeights {
  ad::Tensor<Real> w_query, w_key, w_value;  // each [d x d]
};

/// Query/key/value projections per layer. How many adapters get fused is
/// decided at forward time.
template <typename Real>
struct FusionWeights {
  std::size_t d_model = 0;
  std::vector<FusionLayerWeights<Real>> layers;

  NamedTensors<Real> named() const;
};

enum class HeadKind { Mlm, SeqCls, TokCls };

std::string head_kind_name(HeadKind k);
HeadKind head_kind_from_name(const std::string& name);

/// logits = h . weight^T + bias. For the MLM head `weight` aliases the base
/// token embedding and `bias` the base mlm_bias.
template <typename Real>
struct HeadWeights {
  HeadKind kind = HeadKind::SeqCls;
  std::size_t n_out = 0;
  ad::Tensor<Real> weight;  // [n_out x d]
  ad::Tensor<Real> bias;    // [1 x n_out]
  std::vector<std::string> labels;  // label names in output order (classification)

  NamedTensors<Real> named() const;
};

template <typename Real>
BaseWeights<Real> init_base(const EncoderConfig& config, std::uint64_t seed);

/// Up-projection starts at zero so a fresh adapter is the identity map.
template <typename Real>
AdapterWeights<Real> init_adapter(const EncoderConfig& config, std::size_t reduction_factor, std::uint64_t seed);

/// Value projection starts at zero so a fresh fusion block is the identity.
template <typename Real>
FusionWeights<Real> init_fusion(const EncoderConfig& config, std::uint64_t seed);

template <typename Real>
HeadWeights<Real> init_head(HeadKind kind, std::vector<std::string> labels, std::size_t d_model, std::uint64_t seed);

template <typename Real>
HeadWeights<Real> mlm_head(const BaseWeights<Real>& base);

/// Deep copies; the result shares no storage with the input.
template <typename Real>
BaseWeights<Real> clone(const BaseWeights<Real>& w);
template <typename Real>
AdapterWeights<Real> clone(const AdapterWeights<Real>& w);
template <typename Real>
FusionWeights<Real> clone(const FusionWeights<Real>& w);
template <typename Real>
HeadWeights<Real> clone(const HeadWeights<Real>& w);

/// Every tensor of `named`.
template <typename Real>
std::vector<ad::Tensor<Real>> tensors_of(const NamedTensors<Real>& named);

template <typename Real>
void set_requires_grad(const NamedTensors<Real>& named, bool on);

}  // namespace kgadapt::model
