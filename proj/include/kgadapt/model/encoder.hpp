// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kgadapt/autodiff/tensor.hpp"
#include "kgadapt/model/weights.hpp"
#include "kgadapt/text/vocab.hpp"

namespace kgadapt::model {

enum class Mode { Train, Eval };

struct ForwardOptions {
  Mode mode = Mode::Eval;
  double dropout_p = 0.0;
  std::uint64_t dropout_seed = 0;
};

/// Adapters applied after each layer's feed-forward residual: the language
/// slot (one adapter, or a fusion of several) and then the task slot. Empty
/// slots are the identity. Holds non-owning pointers.
template <typename Real>
struct AdapterStack {
  std::vector<const AdapterWeights<Real>*> language;
  const FusionWeights<Real>* fusion = nullptr;
  const AdapterWeights<Real>* task = nullptr;

  static AdapterStack none() { return {}; }
  static AdapterStack with_language(const AdapterWeights<Real>& lang, const AdapterWeights<Real>* task = nullptr);
  /// Throws ModelError::FusionArity for fewer than two adapters.
  static AdapterStack with_fusion(std::vector<const AdapterWeights<Real>*> adapters, const FusionWeights<Real>& fusion,
                                  const AdapterWeights<Real>* task = nullptr);

  /// Throws FusionArity / ConfigMismatch when the stack does not fit `config`.
  void validate(const EncoderConfig& config) const;
};

/// Fusion attention weights per layer, each [seq x n_adapters].
template <typename Real>
struct FusionTrace {
  std::vector<ad::Tensor<Real>> attention;
};

/// h + relu(h W_down + b_down) W_up + b_up.
template <typename Real>
ad::Tensor<Real> adapter_forward(const ad::Tensor<Real>& h, const AdapterWeights<Real>& adapter, std::size_t layer);

/// The bottleneck activation relu(h W_down + b_down), [seq x d/r].
template <typename Real>
ad::Tensor<Real> adapter_bottleneck(const ad::Tensor<Real>& h, const AdapterWeights<Real>& adapter,
                                    std::size_t layer);

/// Per position: softmax over adapters of (h W_Q).(o_i W_K)/sqrt(d), then
/// h + sum_i alpha_i (o_i W_V). `attention`, when given, receives alpha.
template <typename Real>
ad::Tensor<Real> fusion_forward(const ad::Tensor<Real>& h, const std::vector<ad::Tensor<Real>>& adapter_outputs,
                                const FusionWeights<Real>& fusion, std::size_t layer,
                                ad::Tensor<Real>* attention = nullptr);

/// Pre-LN encoder over one sequence; returns final-normed states [seq x d].
/// Throws ModelError::SeqLen when ids exceed max_seq_len.
template <typename Real>
ad::Tensor<Real> encoder_forward(std::span<const text::TokenId> ids, const BaseWeights<Real>& base,
                                 const AdapterStack<Real>& stack, const ForwardOptions& options = {},
                                 FusionTrace<Real>* trace = nullptr);

/// mlm: [seq x vocab]; seq_cls: [1 x n_classes] from position 0; tok_cls:
/// [seq x n_tags].
template <typename Real>
ad::Tensor<Real> head_forward(const ad::Tensor<Real>& h, const HeadWeights<Real>& head);

}  // namespace kgadapt::model
