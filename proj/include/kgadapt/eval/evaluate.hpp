// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kgadapt/eval/dataset.hpp"
#include "kgadapt/eval/metrics.hpp"
#include "kgadapt/model/weights.hpp"
#include "kgadapt/text/vocab.hpp"
#include "kgadapt/train/trainer.hpp"

namespace kgadapt::eval {

/// Everything needed to run a trained task model, as stored in a run
/// directory: the base, frozen language adapters, optional fusion, task
/// adapter, head and vocabulary.
struct ModelBundle {
  train::Task task = train::Task::SA;
  train::RunMode mode = train::RunMode::TaskAdapterOnly;
  std::uint64_t seed = 0;
  model::BaseWeights<float> base;
  std::vector<model::AdapterWeights<float>> language;
  std::optional<model::FusionWeights<float>> fusion;
  std::optional<model::AdapterWeights<float>> task_adapter;
  model::HeadWeights<float> head;
  std::optional<text::Vocab> vocab;

  /// Non-owning view; the bundle must outlive it.
  train::TaskModel view() const;
};

/// Writes the components as checkpoints plus bundle.json into `dir`.
void save_bundle(const std::filesystem::path& dir, const ModelBundle& bundle);
/// Throws ModelError for corrupt or mismatched checkpoints.
ModelBundle load_bundle(const std::filesystem::path& dir);

EvalReport evaluate_sa(const train::TaskModel& m, const std::vector<SaExample>& examples, const text::Vocab& vocab);

/// Words cut off by max_seq_len count as predicted "O".
EvalReport evaluate_ner(const train::TaskModel& m, const std::vector<NerExample>& examples, const text::Vocab& vocab);

/// Eval-mode prediction over the chosen split ("train", "val" or "test") of
/// the dataset at `data`. Throws EvalError::ConfigMismatch when the head's
/// label space does not cover the dataset.
EvalReport evaluate_model(const ModelBundle& bundle, const std::filesystem::path& data,
                          const std::string& split = "test");

void write_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report(const std::filesystem::path& path);

}  // namespace kgadapt::eval
