// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "kgadapt/text/masking.hpp"

namespace kgadapt::train {

enum class RunMode { FullFt, TaskAdapterOnly, LangAdapter, TaskOnLang, TaskOnFusion };

std::string run_mode_name(RunMode m);  // "full_ft", "task_adapter_only", ...
RunMode run_mode_from_name(const std::string& name);
bool is_task_mode(RunMode m);

enum class Task { SA, NER };
std::string task_name(Task t);  // "sa", "ner"
Task task_from_name(const std::string& name);

struct TrainConfig {
  RunMode mode = RunMode::TaskAdapterOnly;
  std::optional<text::Objective> objective;  // lang_adapter mode only
  double lr = 1e-4;
  std::size_t batch_size = 64;
  /// Step budget. When zero, `epochs` passes over the training split.
  std::size_t max_steps = 0;
  std::size_t epochs = 1;
  double dropout_p = 0.1;
  std::uint64_t seed = 0;
  /// Validation cadence in steps; zero means once per epoch.
  std::size_t eval_every = 0;
  std::size_t reduction_factor = 16;
  text::MaskingConfig masking;
  /// Tail fraction held out for validation when a corpus has no split.
  double val_fraction = 0.1;

  /// Throws TrainError::InvalidConfig.
  void validate() const;
  std::size_t steps_per_epoch(std::size_t n_train) const;
  std::size_t total_steps(std::size_t n_train) const;
  std::size_t effective_eval_every(std::size_t n_train) const;

  bool operator==(const TrainConfig&) const = default;
};

nlohmann::ordered_json to_json(const TrainConfig& c);
/// Overlays the fields present in `j` onto `base`; unknown keys are rejected
/// with TrainError::InvalidConfig.
TrainConfig apply_json(TrainConfig base, const nlohmann::json& j);

/// Named hyperparameter sets: "lang-cn", "lang-wiki", "sa", "ner". For the
/// task presets the learning rate depends on whether a language adapter sits
/// under the task adapter, so `mode` selects it. Throws
/// TrainError::InvalidConfig for an unknown name.
TrainConfig preset(const std::string& name, std::optional<RunMode> mode = std::nullopt);

}  // namespace kgadapt::train
