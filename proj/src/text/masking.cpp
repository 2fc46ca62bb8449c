// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/text/masking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kgadapt/error.hpp"
#include "kgadapt/rng.hpp"

namespace kgadapt::text {

std::string_view objective_name(Objective o) {
  switch (o) {
    case Objective::MLM: return "mlm";
    case Objective::FLM: return "flm";
    case Objective::TLM: return "tlm";
  }
  return "mlm";
}

Objective objective_from_name(std::string_view name) {
  if (name == "mlm" || name == "MLM") return Objective::MLM;
  if (name == "flm" || name == "FLM") return Objective::FLM;
  if (name == "tlm" || name == "TLM") return Objective::TLM;
  throw std::invalid_argument("unknown objective '" + std::string(name) + "' (expected mlm, flm or tlm)");
}

void MaskingConfig::validate() const {
  const auto open_unit = [](double p) { return p > 0.0 && p < 1.0; };
  if (!open_unit(p_mlm) || !open_unit(p_tlm))
    throw PipelineError(PipelineError::Kind::InvalidConfig, "masking probabilities must lie in (0, 1)");
  if (replace_mask < 0 || replace_random < 0 || keep_original < 0 ||
      std::abs(replace_mask + replace_random + keep_original - 1.0) > 1e-9)
    throw PipelineError(PipelineError::Kind::InvalidConfig, "replacement fractions must be nonnegative and sum to 1");
}

std::size_t MaskedExample::label_count() const {
  return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto l) { return l != kIgnore; }));
}

nlohmann::ordered_json to_json(const MaskedExample& ex) {
  nlohmann::ordered_json j;
  j["input_ids"] = ex.input_ids;
  j["labels"] = ex.labels;
  j["objective"] = std::string(objective_name(ex.objective));
  j["seed"] = ex.seed;
  return j;
}

namespace {

enum class Action { Mask, Random, Keep };

class Masker {
 public:
  Masker(const TokenizedSentence& ts, const MaskingConfig& cfg, std::size_t vocab_size, Objective objective,
         std::uint64_t seed)
      : cfg_(cfg), vocab_size_(vocab_size), rng_(seed) {
    cfg.validate();
    if (vocab_size <= static_cast<std::size_t>(kFirstRegular))
      throw std::invalid_argument("masking needs a vocabulary with at least one regular token");
    ex_.input_ids = ts.token_ids;
    ex_.labels.assign(ts.token_ids.size(), kIgnore);
    ex_.objective = objective;
    ex_.seed = seed;
    original_ = ts.token_ids;
  }

  Rng& rng() { return rng_; }

  /// Selects each of `count` units with probability p, forcing one uniformly
  /// when none was drawn.
  std::vector<std::size_t> select(std::size_t count, double p) {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < count; ++i)
      if (rng_.uniform() < p) chosen.push_back(i);
    if (chosen.empty()) chosen.push_back(static_cast<std::size_t>(rng_.below(count)));
    return chosen;
  }

  Action draw_action() {
    const double u = rng_.uniform();
    if (u < cfg_.replace_mask) return Action::Mask;
    if (u < cfg_.replace_mask + cfg_.replace_random) return Action::Random;
    return Action::Keep;
  }

  void apply(WordRange range, Action action) {
    for (std::size_t pos = range.start; pos < range.end; ++pos) {
      ex_.labels[pos] = original_[pos];
      switch (action) {
        case Action::Mask: ex_.input_ids[pos] = kMask; break;
        case Action::Random:
          ex_.input_ids[pos] =
              kFirstRegular + static_cast<TokenId>(rng_.below(vocab_size_ - static_cast<std::size_t>(kFirstRegular)));
          break;
        case Action::Keep: break;
      }
    }
  }

  MaskedExample finish() { return std::move(ex_); }

 private:
  const MaskingConfig& cfg_;
  std::size_t vocab_size_;
  Rng rng_;
  MaskedExample ex_;
  std::vector<TokenId> original_;
};

void require_tokens(const TokenizedSentence& ts, const char* op) {
  if (ts.word_boundaries.empty())
    throw PipelineError(PipelineError::Kind::NoTargets, std::string(op) + ": sentence has no regular tokens");
}

// Masks whole words picked from `candidates` (indices into word_boundaries).
MaskedExample mask_words(const TokenizedSentence& ts, const std::vector<std::size_t>& candidates, double p,
                         Masker& masker) {
  for (std::size_t k : masker.select(candidates.size(), p)) {
    const WordRange range = ts.word_boundaries[candidates[k]];
    masker.apply(range, masker.draw_action());
  }
  return masker.finish();
}

}  // namespace

MaskedExample mask_mlm(const TokenizedSentence& ts, const MaskingConfig& cfg, std::size_t vocab_size,
                       std::uint64_t seed) {
  require_tokens(ts, "mask_mlm");
  Masker masker(ts, cfg, vocab_size, Objective::MLM, seed);
  std::vector<std::size_t> positions;
  for (const auto& w : ts.word_boundaries)
    for (std::size_t p = w.start; p < w.end; ++p) positions.push_back(p);
  for (std::size_t k : masker.select(positions.size(), cfg.p_mlm))
    masker.apply({positions[k], positions[k] + 1}, masker.draw_action());
  return masker.finish();
}

MaskedExample mask_flm(const TokenizedSentence& ts, const MaskingConfig& cfg, std::size_t vocab_size,
                       std::uint64_t seed) {
  require_tokens(ts, "mask_flm");
  Masker masker(ts, cfg, vocab_size, Objective::FLM, seed);
  std::vector<std::size_t> words(ts.word_boundaries.size());
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = i;
  return mask_words(ts, words, cfg.p_mlm, masker);
}

MaskedExample mask_tlm(const TokenizedSentence& ts, const MaskingConfig& cfg, std::size_t vocab_size,
                       std::uint64_t seed) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < ts.word_roles.size(); ++i)
    if (ts.word_roles[i] == WordRole::Subject || ts.word_roles[i] == WordRole::Object) candidates.push_back(i);
  if (candidates.empty())
    throw PipelineError(PipelineError::Kind::NoTargets, "mask_tlm: sentence has no subject or object words");
  Masker masker(ts, cfg, vocab_size, Objective::TLM, seed);
  return mask_words(ts, candidates, cfg.p_tlm, masker);
}

MaskedExample mask(Objective objective, const TokenizedSentence& ts, const MaskingConfig& cfg,
                   std::size_t vocab_size, std::uint64_t seed) {
  switch (objective) {
    case Objective::MLM: return mask_mlm(ts, cfg, vocab_size, seed);
    case Objective::FLM: return mask_flm(ts, cfg, vocab_size, seed);
    case Objective::TLM: return mask_tlm(ts, cfg, vocab_size, seed);
  }
  return mask_mlm(ts, cfg, vocab_size, seed);
}

}  // namespace kgadapt::text
