// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kgadapt/kg/corpus.hpp"
#include "kgadapt/model/weights.hpp"
#include "kgadapt/text/vocab.hpp"
#include "kgadapt/train/config.hpp"
#include "kgadapt/train/freeze.hpp"
#include "kgadapt/train/task_data.hpp"

namespace kgadapt::train {

using Weights = float;

struct RunPoint {
  std::size_t step = 0;
  double train_loss = 0.0;  // mean over the steps since the previous point
  double val_loss = 0.0;
  double val_metric = 0.0;

  bool operator==(const RunPoint&) const = default;
};

struct RunRecord {
  RunMode mode = RunMode::TaskAdapterOnly;
  std::string metric;  // "masked_token_accuracy", "f1", "seqeval_f1"
  std::vector<RunPoint> points;
  std::vector<double> step_losses;  // batch loss of every optimizer step
  std::size_t best_index = 0;       // into points
  std::string best_checkpoint;      // set by whoever writes the weights
  FreezeReport freeze;

  const RunPoint& best() const { return points.at(best_index); }
  bool operator==(const RunRecord& o) const {
    return mode == o.mode && metric == o.metric && points == o.points && step_losses == o.step_losses &&
           best_index == o.best_index && best_checkpoint == o.best_checkpoint;
  }
};

/// One JSON object per eval point, newline-terminated.
std::string to_jsonl(const RunRecord& r);
nlohmann::ordered_json summary_json(const RunRecord& r, const TrainConfig& cfg);
void write_run_record(const RunRecord& r, const TrainConfig& cfg, const std::filesystem::path& jsonl,
                      const std::filesystem::path& summary);

struct LanguageAdapterResult {
  model::AdapterWeights<Weights> adapter;  // best checkpoint by validation loss
  RunRecord record;
};

/// Frozen language adapters beneath the task adapter; `fusion` selects
/// AdapterFusion (trainable) over them.
struct LanguageSlot {
  std::vector<const model::AdapterWeights<Weights>*> adapters;
  bool fusion = false;

  static LanguageSlot none() { return {}; }
  static LanguageSlot single(const model::AdapterWeights<Weights>& a) { return {{&a}, false}; }
  static LanguageSlot fused(std::vector<const model::AdapterWeights<Weights>*> list) { return {std::move(list), true}; }
  RunMode mode() const;
};

struct TaskResult {
  std::optional<model::BaseWeights<Weights>> base;  // full fine-tuning only
  std::optional<model::AdapterWeights<Weights>> task_adapter;
  std::optional<model::FusionWeights<Weights>> fusion;
  model::HeadWeights<Weights> head;
  RunRecord record;
};

/// Trains one adapter with a masked-LM objective over `corpus`; base weights,
/// embeddings and the tied MLM head stay untouched. The tail val_fraction of
/// the corpus is held out with masks fixed once. Throws
/// TrainError::ObjectiveDataMismatch for TLM on records without spans.
LanguageAdapterResult train_language_adapter(const std::vector<kg::CorpusRecord>& corpus, const text::Vocab& vocab,
                                             const TrainConfig& cfg, const model::BaseWeights<Weights>& base);

/// Task adapter + head (+ fusion when the slot asks for it) over a frozen
/// base and frozen language adapters.
TaskResult train_task_adapter(const TaskDataset& data, const TrainConfig& cfg,
                              const model::BaseWeights<Weights>& base, const LanguageSlot& slot,
                              const model::HeadWeights<Weights>* initial_head = nullptr);

/// Every parameter of base and head is trained.
TaskResult train_full_finetune(const TaskDataset& data, const TrainConfig& cfg,
                               const model::BaseWeights<Weights>& base,
                               const model::HeadWeights<Weights>* initial_head = nullptr);

/// Components of a trained (or to-be-trained) task model, for prediction.
struct TaskModel {
  const model::BaseWeights<Weights>* base = nullptr;
  LanguageSlot slot;
  const model::FusionWeights<Weights>* fusion = nullptr;
  const model::AdapterWeights<Weights>* task_adapter = nullptr;
  const model::HeadWeights<Weights>* head = nullptr;
};

/// Eval-mode mean cross-entropy over `examples`.
double task_loss(const TaskModel& m, const std::vector<EncodedExample>& examples);

/// Predicted label ids: one per SA example, one per kept word for NER.
std::vector<std::vector<std::int32_t>> predict(const TaskModel& m, const std::vector<EncodedExample>& examples);

}  // namespace kgadapt::train
