// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/model/encoder.hpp"

#include <cmath>

#include "kgadapt/autodiff/ops.hpp"
#include "kgadapt/error.hpp"
#include "kgadapt/rng.hpp"

namespace kgadapt::model {

using ad::Tensor;

namespace {

void require_width(const char* op, std::size_t got, std::size_t want) {
  if (got != want) {
    throw ShapeError(std::string(op) + ": hidden width " + std::to_string(got) + " != " + std::to_string(want));
  }
}

template <typename Real>
Tensor<Real> affine(const Tensor<Real>& x, const Tensor<Real>& w, const Tensor<Real>& b) {
  return ad::add(ad::matmul(x, w), b);
}

}  // namespace

template <typename Real>
AdapterStack<Real> AdapterStack<Real>::with_language(const AdapterWeights<Real>& lang, const AdapterWeights<Real>* task) {
  AdapterStack s;
  s.language.push_back(&lang);
  s.task = task;
  return s;
}

template <typename Real>
AdapterStack<Real> AdapterStack<Real>::with_fusion(std::vector<const AdapterWeights<Real>*> adapters,
                                                   const FusionWeights<Real>& fusion,
                                                   const AdapterWeights<Real>* task) {
  if (adapters.size() < 2) {
    throw ModelError(ModelError::Kind::FusionArity,
                     "fusion needs at least 2 language adapters, got " + std::to_string(adapters.size()));
  }
  AdapterStack s;
  s.language = std::move(adapters);
  s.fusion = &fusion;
  s.task = task;
  return s;
}

template <typename Real>
void AdapterStack<Real>::validate(const EncoderConfig& config) const {
  if (fusion != nullptr && language.size() < 2) {
    throw ModelError(ModelError::Kind::FusionArity,
                     "fusion needs at least 2 language adapters, got " + std::to_string(language.size()));
  }
  if (fusion == nullptr && language.size() > 1) {
    throw ModelError(ModelError::Kind::FusionArity,
                     std::to_string(language.size()) + " language adapters given without fusion weights");
  }
  auto check_adapter = [&](const AdapterWeights<Real>* a, const char* slot) {
    if (a == nullptr) throw std::invalid_argument(std::string("null ") + slot + " adapter");
    if (a->d_model != config.d_model || a->layers.size() != config.n_layers) {
      throw ModelError(ModelError::Kind::ConfigMismatch,
                       std::string(slot) + " adapter has d_model=" + std::to_string(a->d_model) +
                           " layers=" + std::to_string(a->layers.size()) + ", encoder has d_model=" +
                           std::to_string(config.d_model) + " layers=" + std::to_string(config.n_layers));
    }
  };
  for (const auto* a : language) check_adapter(a, "language");
  if (task != nullptr) check_adapter(task, "task");
  if (fusion != nullptr && (fusion->d_model != config.d_model || fusion->layers.size() != config.n_layers)) {
    throw ModelError(ModelError::Kind::ConfigMismatch, "fusion weights do not match the encoder shape");
  }
}

template <typename Real>
Tensor<Real> adapter_bottleneck(const Tensor<Real>& h, const AdapterWeights<Real>& adapter, std::size_t layer) {
  if (h.rank() != 2) throw ShapeError("adapter_forward: expected [seq x d_model], got " + ad::shape_str(h.shape()));
  require_width("adapter_forward", h.dim(1), adapter.d_model);
  const auto& l = adapter.layers.at(layer);
  return ad::relu(affine(h, l.w_down, l.b_down));
}

template <typename Real>
Tensor<Real> adapter_forward(const Tensor<Real>& h, const AdapterWeights<Real>& adapter, std::size_t layer) {
  const auto& l = adapter.layers.at(layer);
  return ad::add(h, affine(adapter_bottleneck(h, adapter, layer), l.w_up, l.b_up));
}

template <typename Real>
Tensor<Real> fusion_forward(const Tensor<Real>& h, const std::vector<Tensor<Real>>& adapter_outputs,
                            const FusionWeights<Real>& fusion, std::size_t layer, Tensor<Real>* attention) {
  if (adapter_outputs.size() < 2) {
    throw ModelError(ModelError::Kind::FusionArity,
                     "fusion needs at least 2 adapter outputs, got " + std::to_string(adapter_outputs.size()));
  }
  if (h.rank() != 2) throw ShapeError("fusion_forward: expected [seq x d_model], got " + ad::shape_str(h.shape()));
  require_width("fusion_forward", h.dim(1), fusion.d_model);
  for (const auto& o : adapter_outputs) {
    if (o.shape() != h.shape()) {
      throw ShapeError("fusion_forward: adapter output " + ad::shape_str(o.shape()) + " vs hidden " +
                       ad::shape_str(h.shape()));
    }
  }
  const auto& l = fusion.layers.at(layer);
  const Real inv_sqrt_d = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(fusion.d_model)));
  const Tensor<Real> q = ad::matmul(h, l.w_query);
  std::vector<Tensor<Real>> logits;
  std::vector<Tensor<Real>> values;
  for (const auto& o : adapter_outputs) {
    const Tensor<Real> k = ad::matmul(o, l.w_key);
    logits.push_back(ad::scale(ad::sum_axis(ad::mul(q, k), 1), inv_sqrt_d));
    values.push_back(ad::matmul(o, l.w_value));
  }
  const Tensor<Real> alpha = ad::softmax(ad::concat(logits, 1), 1);  // [seq x n]
  if (attention != nullptr) *attention = alpha;
  Tensor<Real> out = h;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out = ad::add(out, ad::mul(ad::slice(alpha, 1, i, 1), values[i]));
  }
  return out;
}

template <typename Real>
Tensor<Real> encoder_forward(std::span<const text::TokenId> ids, const BaseWeights<Real>& base,
                             const AdapterStack<Real>& stack, const ForwardOptions& options,
                             FusionTrace<Real>* trace) {
  const EncoderConfig& cfg = base.config;
  if (ids.empty()) throw ShapeError("encoder_forward: empty sequence");
  if (ids.size() > cfg.max_seq_len) {
    throw ModelError(ModelError::Kind::SeqLen, "sequence of " + std::to_string(ids.size()) +
                                                   " tokens exceeds max_seq_len " + std::to_string(cfg.max_seq_len));
  }
  for (auto id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
      throw ShapeError("encoder_forward: token id " + std::to_string(id) + " outside vocab of " +
                       std::to_string(cfg.vocab_size));
    }
  }
  stack.validate(cfg);
  if (trace != nullptr) trace->attention.clear();

  const bool training = options.mode == Mode::Train;
  const double p = options.dropout_p;
  std::uint64_t site = 0;
  auto drop = [&](const Tensor<Real>& x) {
    return ad::dropout(x, p, derive_seed({options.dropout_seed, site++}), training);
  };

  const std::size_t seq = ids.size();
  const std::size_t hd = cfg.head_dim();
  const Real att_scale = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(hd)));

  std::vector<std::int32_t> positions(seq);
  for (std::size_t i = 0; i < seq; ++i) positions[i] = static_cast<std::int32_t>(i);
  Tensor<Real> h = ad::add(ad::embedding_lookup(base.token_embedding, ids),
                           ad::embedding_lookup(base.position_embedding, std::span<const std::int32_t>(positions)));
  h = drop(h);

  for (std::size_t li = 0; li < cfg.n_layers; ++li) {
    const auto& L = base.layers[li];

    const Tensor<Real> x = ad::layer_norm(h, 1, L.ln1_gamma, L.ln1_beta);
    const Tensor<Real> q = affine(x, L.w_q, L.b_q);
    const Tensor<Real> k = affine(x, L.w_k, L.b_k);
    const Tensor<Real> v = affine(x, L.w_v, L.b_v);
    std::vector<Tensor<Real>> heads;
    heads.reserve(cfg.n_heads);
    for (std::size_t hi = 0; hi < cfg.n_heads; ++hi) {
      const auto qh = ad::slice(q, 1, hi * hd, hd);
      const auto kh = ad::slice(k, 1, hi * hd, hd);
      const auto vh = ad::slice(v, 1, hi * hd, hd);
      const auto att = ad::softmax(ad::scale(ad::matmul_nt(qh, kh), att_scale), 1);
      heads.push_back(ad::matmul(att, vh));
    }
    const Tensor<Real> ctx = heads.size() == 1 ? heads[0] : ad::concat(heads, 1);
    h = ad::add(h, drop(affine(ctx, L.w_o, L.b_o)));

    const Tensor<Real> y = ad::layer_norm(h, 1, L.ln2_gamma, L.ln2_beta);
    h = ad::add(h, drop(affine(ad::gelu(affine(y, L.w_ff1, L.b_ff1)), L.w_ff2, L.b_ff2)));

    // Language slot, then task slot.
    if (stack.fusion != nullptr) {
      std::vector<Tensor<Real>> outs;
      outs.reserve(stack.language.size());
      for (const auto* a : stack.language) outs.push_back(adapter_forward(h, *a, li));
      Tensor<Real> alpha;
      h = fusion_forward(h, outs, *stack.fusion, li, &alpha);
      if (trace != nullptr) trace->attention.push_back(alpha.detach());
    } else if (!stack.language.empty()) {
      h = adapter_forward(h, *stack.language.front(), li);
    }
    if (stack.task != nullptr) h = adapter_forward(h, *stack.task, li);
  }
  return ad::layer_norm(h, 1, base.final_ln_gamma, base.final_ln_beta);
}

template <typename Real>
Tensor<Real> head_forward(const Tensor<Real>& h, const HeadWeights<Real>& head) {
  if (h.rank() != 2) throw ShapeError("head_forward: expected [seq x d_model], got " + ad::shape_str(h.shape()));
  if (!head.weight.defined() || head.weight.rank() != 2 || head.weight.dim(0) != head.n_out) {
    throw ShapeError("head_forward: head weight is not [n_out x d_model]");
  }
  require_width("head_forward", h.dim(1), head.weight.dim(1));
  const Tensor<Real> x = head.kind == HeadKind::SeqCls ? ad::slice(h, 0, 0, 1) : h;
  return ad::add(ad::matmul_nt(x, head.weight), head.bias);
}

#define KGADAPT_INSTANTIATE(R)                                                                                 \
  template struct AdapterStack<R>;                                                                             \
  template Tensor<R> adapter_forward<R>(const Tensor<R>&, const AdapterWeights<R>&, std::size_t);              \
  template Tensor<R> adapter_bottleneck<R>(const Tensor<R>&, const AdapterWeights<R>&, std::size_t);           \
  template Tensor<R> fusion_forward<R>(const Tensor<R>&, const std::vector<Tensor<R>>&, const FusionWeights<R>&, \
                                       std::size_t, Tensor<R>*);                                               \
  template Tensor<R> encoder_forward<R>(std::span<const text::TokenId>, const BaseWeights<R>&,                 \
                                        const AdapterStack<R>&, const ForwardOptions&, FusionTrace<R>*);       \
  template Tensor<R> head_forward<R>(const Tensor<R>&, const HeadWeights<R>&);

KGADAPT_INSTANTIATE(float)
KGADAPT_INSTANTIATE(double)

}  // namespace kgadapt::model
