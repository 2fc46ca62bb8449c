// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "json.hpp"

namespace kgadapt::model {

struct EncoderConfig {
  std::size_t n_layers = 2;
  std::size_t d_model = 64;
  std::size_t n_heads = 4;
  std::size_t d_ff = 128;
  std::size_t vocab_size = 512;
  std::size_t max_seq_len = 64;
  double dropout_p = 0.1;

  /// Throws ModelError::ConfigMismatch naming the offending field.
  void validate() const;
  std::size_t head_dim() const { return d_model / n_heads; }

  bool operator==(const EncoderConfig&) const = default;
};

nlohmann::ordered_json to_json(const EncoderConfig& c);
EncoderConfig encoder_config_from_json(const nlohmann::json& j);

}  // namespace kgadapt::model
