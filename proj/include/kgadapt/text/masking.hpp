// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kgadapt/text/tokenizer.hpp"

namespace kgadapt::text {

inline constexpr std::int32_t kIgnore = -100;

enum class Objective { MLM, FLM, TLM };

std::string_view objective_name(Objective o);  // "mlm", "flm", "tlm"
Objective objective_from_name(std::string_view name);

struct MaskingConfig {
  double p_mlm = 0.15;
  double p_tlm = 0.5;
  double replace_mask = 0.8;
  double replace_random = 0.1;
  double keep_original = 0.1;

  /// Throws PipelineError::InvalidConfig.
  void validate() const;
  bool operator==(const MaskingConfig&) const = default;
};

struct MaskedExample {
  std::vector<TokenId> input_ids;
  std::vector<std::int32_t> labels;  // original id at predicted positions, else kIgnore
  Objective objective = Objective::MLM;
  std::uint64_t seed = 0;

  std::size_t label_count() const;
  bool operator==(const MaskedExample&) const = default;
};

nlohmann::ordered_json to_json(const MaskedExample& ex);

/// Independent per-token selection with p_mlm. `vocab_size` bounds the random
/// replacement draw (regular ids only).
MaskedExample mask_mlm(const TokenizedSentence& ts, const MaskingConfig& cfg, std::size_t vocab_size,
                       std::uint64_t seed);

/// Per-word selection with p_mlm; a selected word is masked as a whole.
MaskedExample mask_flm(const TokenizedSentence& ts, const MaskingConfig& cfg, std::size_t vocab_size,
                       std::uint64_t seed);

/// Per-word selection with p_tlm among subject/object words only. Throws
/// PipelineError::NoTargets when the sentence has no such word.
MaskedExample mask_tlm(const TokenizedSentence& ts, const MaskingConfig& cfg, std::size_t vocab_size,
                       std::uint64_t seed);

MaskedExample mask(Objective objective, const TokenizedSentence& ts, const MaskingConfig& cfg,
                   std::size_t vocab_size, std::uint64_t seed);

}  // namespace kgadapt::text
