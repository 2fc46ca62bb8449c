// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/model/config.hpp"

#include "kgadapt/error.hpp"

namespace kgadapt::model {

void EncoderConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw ModelError(ModelError::Kind::ConfigMismatch, "invalid encoder config: " + what);
  };
  if (n_layers == 0) fail("n_layers must be positive");
  if (d_model == 0) fail("d_model must be positive");
  if (n_heads == 0) fail("n_heads must be positive");
  if (d_ff == 0) fail("d_ff must be positive");
  if (vocab_size == 0) fail("vocab_size must be positive");
  if (max_seq_len == 0) fail("max_seq_len must be positive");
  if (d_model % n_heads != 0) {
    fail("d_model " + std::to_string(d_model) + " is not divisible by n_heads " + std::to_string(n_heads));
  }
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) fail("dropout_p must lie in [0, 1)");
}

nlohmann::ordered_json to_json(const EncoderConfig& c) {
  nlohmann::ordered_json j;
  j["n_layers"] = c.n_layers;
  j["d_model"] = c.d_model;
  j["n_heads"] = c.n_heads;
  j["d_ff"] = c.d_ff;
  j["vocab_size"] = c.vocab_size;
  j["max_seq_len"] = c.max_seq_len;
  j["dropout_p"] = c.dropout_p;
  return j;
}

EncoderConfig encoder_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ModelError(ModelError::Kind::FormatError, "encoder config must be a JSON object");
  }
  EncoderConfig c;
  try {
    c.n_layers = j.value("n_layers", c.n_layers);
    c.d_model = j.value("d_model", c.d_model);
    c.n_heads = j.value("n_heads", c.n_heads);
    c.d_ff = j.value("d_ff", c.d_ff);
    c.vocab_size = j.value("vocab_size", c.vocab_size);
    c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
    c.dropout_p = j.value("dropout_p", c.dropout_p);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(ModelError::Kind::FormatError, std::string("encoder config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace kgadapt::model
