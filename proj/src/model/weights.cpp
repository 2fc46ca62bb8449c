// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/model/weights.hpp"

#include <cmath>
#include <stdexcept>

#include "kgadapt/error.hpp"
#include "kgadapt/rng.hpp"

namespace kgadapt::model {

using ad::Shape;
using ad::Tensor;

namespace {

template <typename Real>
Tensor<Real> uniform(Shape shape, double bound, Rng& rng) {
  std::vector<Real> v(ad::numel(shape));
  for (auto& x : v) x = static_cast<Real>(rng.uniform(-bound, bound));
  return Tensor<Real>::from(std::move(shape), std::move(v));
}

// Keeps activations near unit variance: U(-a, a) has variance a^2 / 3.
template <typename Real>
Tensor<Real> linear(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  return uniform<Real>({fan_in, fan_out}, std::sqrt(3.0 / static_cast<double>(fan_in)), rng);
}

template <typename Real>
Tensor<Real> zeros(Shape s) {
  return Tensor<Real>::zeros(std::move(s));
}

template <typename Real>
Tensor<Real> ones(std::size_t n) {
  return Tensor<Real>::full({n}, Real(1));
}

template <typename Real>
Tensor<Real> copy(const Tensor<Real>& t) {
  return t.defined() ? t.clone() : Tensor<Real>();
}

}  // namespace

std::string head_kind_name(HeadKind k) {
  switch (k) {
    case HeadKind::Mlm: return "mlm";
    case HeadKind::SeqCls: return "seq_cls";
    case HeadKind::TokCls: return "tok_cls";
  }
  return "?";
}

HeadKind head_kind_from_name(const std::string& name) {
  if (name == "mlm") return HeadKind::Mlm;
  if (name == "seq_cls") return HeadKind::SeqCls;
  if (name == "tok_cls") return HeadKind::TokCls;
  throw ModelError(ModelError::Kind::FormatError, "unknown head kind '" + name + "'");
}

template <typename Real>
NamedTensors<Real> BaseWeights<Real>::named() const {
  NamedTensors<Real> out;
  out.emplace_back("token_embedding", token_embedding);
  out.emplace_back("position_embedding", position_embedding);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const std::string p = "layers." + std::to_string(i) + ".";
    out.emplace_back(p + "ln1.gamma", l.ln1_gamma);
    out.emplace_back(p + "ln1.beta", l.ln1_beta);
    out.emplace_back(p + "attn.w_q", l.w_q);
    out.emplace_back(p + "attn.b_q", l.b_q);
    out.emplace_back(p + "attn.w_k", l.w_k);
    out.emplace_back(p + "attn.b_k", l.b_k);
    out.emplace_back(p + "attn.w_v", l.w_v);
    out.emplace_back(p + "attn.b_v", l.b_v);
    out.emplace_back(p + "attn.w_o", l.w_o);
    out.emplace_back(p + "attn.b_o", l.b_o);
    out.emplace_back(p + "ln2.gamma", l.ln2_gamma);
    out.emplace_back(p + "ln2.beta", l.ln2_beta);
    out.emplace_back(p + "ffn.w_1", l.w_ff1);
    out.emplace_back(p + "ffn.b_1", l.b_ff1);
    out.emplace_back(p + "ffn.w_2", l.w_ff2);
    out.emplace_back(p + "ffn.b_2", l.b_ff2);
  }
  out.emplace_back("final_ln.gamma", final_ln_gamma);
  out.emplace_back("final_ln.beta", final_ln_beta);
  out.emplace_back("mlm_bias", mlm_bias);
  return out;
}

template <typename Real>
NamedTensors<Real> AdapterWeights<Real>::named() const {
  NamedTensors<Real> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string p = "layers." + std::to_string(i) + ".";
    out.emplace_back(p + "w_down", layers[i].w_down);
    out.emplace_back(p + "b_down", layers[i].b_down);
    out.emplace_back(p + "w_up", layers[i].w_up);
    out.emplace_back(p + "b_up", layers[i].b_up);
  }
  return out;
}

template <typename Real>
NamedTensors<Real> FusionWeights<Real>::named() const {
  NamedTensors<Real> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string p = "layers." + std::to_string(i) + ".";
    out.emplace_back(p + "w_query", layers[i].w_query);
    out.emplace_back(p + "w_key", layers[i].w_key);
    out.emplace_back(p + "w_value", layers[i].w_value);
  }
  return out;
}

template <typename Real>
NamedTensors<Real> HeadWeights<Real>::named() const {
  return {{"weight", weight}, {"bias", bias}};
}

// Projections that write into the residual stream start small, so a frozen
// random base roughly passes token identity through to the top layer. Token
// rows are large enough for the tied MLM head to reach confident logits.
constexpr double kResidualInitScale = 0.05;
constexpr double kTokenInitBound = 0.3;
constexpr double kPositionInitBound = 0.02;

template <typename Real>
Tensor<Real> residual_out(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  return uniform<Real>({fan_in, fan_out}, kResidualInitScale * std::sqrt(3.0 / static_cast<double>(fan_in)), rng);
}

template <typename Real>
BaseWeights<Real> init_base(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed({seed, 0xba5e}));
  const std::size_t d = config.d_model;
  BaseWeights<Real> w;
  w.config = config;
  w.token_embedding = uniform<Real>({config.vocab_size, d}, kTokenInitBound, rng);
  w.position_embedding = uniform<Real>({config.max_seq_len, d}, kPositionInitBound, rng);
  for (std::size_t i = 0; i < config.n_layers; ++i) {
    EncoderLayerWeights<Real> l;
    l.ln1_gamma = ones<Real>(d);
    l.ln1_beta = zeros<Real>({d});
    l.w_q = linear<Real>(d, d, rng);
    l.b_q = zeros<Real>({1, d});
    l.w_k = linear<Real>(d, d, rng);
    l.b_k = zeros<Real>({1, d});
    l.w_v = linear<Real>(d, d, rng);
    l.b_v = zeros<Real>({1, d});
    l.w_o = residual_out<Real>(d, d, rng);
    l.b_o = zeros<Real>({1, d});
    l.ln2_gamma = ones<Real>(d);
    l.ln2_beta = zeros<Real>({d});
    l.w_ff1 = linear<Real>(d, config.d_ff, rng);
    l.b_ff1 = zeros<Real>({1, config.d_ff});
    l.w_ff2 = residual_out<Real>(config.d_ff, d, rng);
    l.b_ff2 = zeros<Real>({1, d});
    w.layers.push_back(std::move(l));
  }
  w.final_ln_gamma = ones<Real>(d);
  w.final_ln_beta = zeros<Real>({d});
  w.mlm_bias = zeros<Real>({1, config.vocab_size});
  return w;
}

template <typename Real>
AdapterWeights<Real> init_adapter(const EncoderConfig& config, std::size_t reduction_factor, std::uint64_t seed) {
  config.validate();
  if (reduction_factor == 0 || config.d_model % reduction_factor != 0) {
    throw ModelError(ModelError::Kind::ConfigMismatch,
                     "reduction factor " + std::to_string(reduction_factor) + " does not divide d_model " +
                         std::to_string(config.d_model));
  }
  Rng rng(derive_seed({seed, 0xada9}));
  AdapterWeights<Real> a;
  a.d_model = config.d_model;
  a.reduction_factor = reduction_factor;
  const std::size_t b = a.bottleneck();
  for (std::size_t i = 0; i < config.n_layers; ++i) {
    AdapterLayerWeights<Real> l;
    l.w_down = linear<Real>(config.d_model, b, rng);
    l.b_down = zeros<Real>({1, b});
    l.w_up = zeros<Real>({b, config.d_model});
    l.b_up = zeros<Real>({1, config.d_model});
    a.layers.push_back(std::move(l));
  }
  return a;
}

template <typename Real>
FusionWeights<Real> init_fusion(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed({seed, 0xf005}));
  FusionWeights<Real> f;
  f.d_model = config.d_model;
  const std::size_t d = config.d_model;
  for (std::size_t i = 0; i < config.n_layers; ++i) {
    FusionLayerWeights<Real> l;
    l.w_query = linear<Real>(d, d, rng);
    l.w_key = linear<Real>(d, d, rng);
    l.w_value = zeros<Real>({d, d});
    f.layers.push_back(std::move(l));
  }
  return f;
}

template <typename Real>
HeadWeights<Real> init_head(HeadKind kind, std::vector<std::string> labels, std::size_t d_model, std::uint64_t seed) {
  if (kind == HeadKind::Mlm) throw std::invalid_argument("init_head: the MLM head is built with mlm_head()");
  if (labels.size() < 2) {
    throw TrainError(TrainError::Kind::LabelSpace, "a classification head needs at least two labels");
  }
  Rng rng(derive_seed({seed, 0x4ead}));
  HeadWeights<Real> h;
  h.kind = kind;
  h.n_out = labels.size();
  h.labels = std::move(labels);
  h.weight = uniform<Real>({h.n_out, d_model}, std::sqrt(3.0 / static_cast<double>(d_model)), rng);
  h.bias = zeros<Real>({1, h.n_out});
  return h;
}

template <typename Real>
HeadWeights<Real> mlm_head(const BaseWeights<Real>& base) {
  HeadWeights<Real> h;
  h.kind = HeadKind::Mlm;
  h.n_out = base.config.vocab_size;
  h.weight = base.token_embedding;
  h.bias = base.mlm_bias;
  return h;
}

template <typename Real>
BaseWeights<Real> clone(const BaseWeights<Real>& w) {
  BaseWeights<Real> c;
  c.config = w.config;
  c.token_embedding = copy(w.token_embedding);
  c.position_embedding = copy(w.position_embedding);
  for (const auto& l : w.layers) {
    c.layers.push_back({copy(l.ln1_gamma), copy(l.ln1_beta), copy(l.w_q), copy(l.b_q), copy(l.w_k), copy(l.b_k),
                        copy(l.w_v), copy(l.b_v), copy(l.w_o), copy(l.b_o), copy(l.ln2_gamma), copy(l.ln2_beta),
                        copy(l.w_ff1), copy(l.b_ff1), copy(l.w_ff2), copy(l.b_ff2)});
  }
  c.final_ln_gamma = copy(w.final_ln_gamma);
  c.final_ln_beta = copy(w.final_ln_beta);
  c.mlm_bias = copy(w.mlm_bias);
  return c;
}

template <typename Real>
AdapterWeights<Real> clone(const AdapterWeights<Real>& w) {
  AdapterWeights<Real> c;
  c.d_model = w.d_model;
  c.reduction_factor = w.reduction_factor;
  for (const auto& l : w.layers) c.layers.push_back({copy(l.w_down), copy(l.b_down), copy(l.w_up), copy(l.b_up)});
  return c;
}

template <typename Real>
FusionWeights<Real> clone(const FusionWeights<Real>& w) {
  FusionWeights<Real> c;
  c.d_model = w.d_model;
  for (const auto& l : w.layers) c.layers.push_back({copy(l.w_query), copy(l.w_key), copy(l.w_value)});
  return c;
}

template <typename Real>
HeadWeights<Real> clone(const HeadWeights<Real>& w) {
  HeadWeights<Real> c = w;
  c.weight = copy(w.weight);
  c.bias = copy(w.bias);
  return c;
}

template <typename Real>
std::vector<ad::Tensor<Real>> tensors_of(const NamedTensors<Real>& named) {
  std::vector<ad::Tensor<Real>> out;
  out.reserve(named.size());
  for (const auto& [_, t] : named) out.push_back(t);
  return out;
}

template <typename Real>
void set_requires_grad(const NamedTensors<Real>& named, bool on) {
  for (const auto& [_, t] : named) {
    auto copy = t;
    copy.set_requires_grad(on);
  }
}

#define KGADAPT_INSTANTIATE(R)                                                                              \
  template struct BaseWeights<R>;                                                                           \
  template struct AdapterWeights<R>;                                                                        \
  template struct FusionWeights<R>;                                                                         \
  template struct HeadWeights<R>;                                                                           \
  template BaseWeights<R> init_base<R>(const EncoderConfig&, std::uint64_t);                                \
  template AdapterWeights<R> init_adapter<R>(const EncoderConfig&, std::size_t, std::uint64_t);             \
  template FusionWeights<R> init_fusion<R>(const EncoderConfig&, std::uint64_t);                            \
  template HeadWeights<R> init_head<R>(HeadKind, std::vector<std::string>, std::size_t, std::uint64_t);     \
  template HeadWeights<R> mlm_head<R>(const BaseWeights<R>&);                                               \
  template BaseWeights<R> clone<R>(const BaseWeights<R>&);                                                  \
  template AdapterWeights<R> clone<R>(const AdapterWeights<R>&);                                            \
  template FusionWeights<R> clone<R>(const FusionWeights<R>&);                                              \
  template HeadWeights<R> clone<R>(const HeadWeights<R>&);                                                  \
  template std::vector<ad::Tensor<R>> tensors_of<R>(const NamedTensors<R>&);                                \
  template void set_requires_grad<R>(const NamedTensors<R>&, bool);

KGADAPT_INSTANTIATE(float)
KGADAPT_INSTANTIATE(double)

}  // namespace kgadapt::model
