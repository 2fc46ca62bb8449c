// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kgadapt/eval/dataset.hpp"
#include "kgadapt/eval/metrics.hpp"
#include "kgadapt/kg/conceptnet_client.hpp"
#include "kgadapt/kg/corpus.hpp"
#include "kgadapt/model/config.hpp"
#include "kgadapt/text/vocab.hpp"
#include "kgadapt/train/config.hpp"
#include "kgadapt/train/trainer.hpp"

namespace kgadapt::experiment {

/// $KGADAPT_FIXTURES when set, else the fixtures directory of the source tree.
std::filesystem::path fixtures_dir();

/// The bundled synthetic setup: a small ConceptNet-style graph over a nonce
/// language ("tx") whose sentiment words link to "good" or "bad", a plain
/// text corpus, and a sentiment set whose labels follow those words.
struct ToyData {
  std::vector<kg::CorpusRecord> kg_corpus;
  std::vector<kg::CorpusRecord> text_corpus;
  eval::Splits<eval::SaExample> sa;
  text::Vocab vocab;
  kg::ExtractStats extract;
};

ToyData load_toy_data(const std::filesystem::path& fixtures);

struct ToyOptions {
  std::uint64_t seed = 7;
  bool with_fusion = true;
  model::EncoderConfig encoder;
  train::TrainConfig kg_adapter;    // language adapter on the graph corpus
  train::TrainConfig text_adapter;  // language adapter on plain text (fusion arm)
  train::TrainConfig task;          // task adapter; the mode is set per arm
};

/// Desk-scale settings for the toy run.
ToyOptions default_toy_options(std::uint64_t seed);

struct ToyArm {
  std::string name;  // "no_la", "cn_la", "fusion"
  train::RunMode mode = train::RunMode::TaskAdapterOnly;
  train::RunRecord record;
  eval::EvalReport val;
  eval::EvalReport test;
};

struct ToyResult {
  std::vector<ToyArm> arms;
  std::vector<train::RunRecord> adapter_records;  // kg, then text when fused
  const ToyArm& arm(const std::string& name) const;
  /// Comparison of the arms; free of paths and timestamps.
  nlohmann::ordered_json summary(std::uint64_t seed) const;
};

/// Trains the language adapters and the three task arms on top of one
/// randomly initialized frozen base. When `out_dir` is set, run records,
/// adapters, bundles and summary.json are written under it.
ToyResult run_toy_experiment(const ToyData& data, const ToyOptions& options,
                             const std::optional<std::filesystem::path>& out_dir = std::nullopt);

}  // namespace kgadapt::experiment
