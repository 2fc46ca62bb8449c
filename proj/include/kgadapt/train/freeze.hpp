// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "kgadapt/model/weights.hpp"
#include "kgadapt/train/config.hpp"

namespace kgadapt::train {

/// Component names: "base", "lang_adapter.<i>", "fusion", "task_adapter",
/// "head".
struct FreezeMask {
  std::vector<std::pair<std::string, bool>> components;  // name, trainable

  bool trainable(const std::string& name) const;
  bool contains(const std::string& name) const;
  /// Throws TrainError::InvalidConfig when nothing is trainable.
  void validate() const;
};

FreezeMask freeze_mask_for(RunMode mode, std::size_t n_language_adapters);

/// SHA-256 over tensor names, shapes and raw value bytes, per component.
using Snapshot = std::map<std::string, std::string>;

template <typename Real>
std::string hash_tensors(const model::NamedTensors<Real>& tensors);

struct ComponentCheck {
  std::string name;
  bool trainable = false;
  bool changed = false;
  bool ok = false;
};

struct FreezeReport {
  std::vector<ComponentCheck> components;
  bool trainable_change_checked = false;
  bool passed = false;
};

nlohmann::ordered_json to_json(const FreezeReport& r);

/// Frozen components must hash identically. Trainable components must differ
/// when `steps_taken` > 0; with no steps that check is skipped.
FreezeReport verify_frozen(const Snapshot& before, const Snapshot& after, const FreezeMask& mask,
                           std::size_t steps_taken);

}  // namespace kgadapt::train
