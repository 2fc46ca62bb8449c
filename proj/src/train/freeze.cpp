// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/train/freeze.hpp"

#include <cstring>

#include "kgadapt/error.hpp"
#include "kgadapt/hash.hpp"

namespace kgadapt::train {

bool FreezeMask::trainable(const std::string& name) const {
  for (const auto& [n, t] : components) {
    if (n == name) return t;
  }
  return false;
}

bool FreezeMask::contains(const std::string& name) const {
  for (const auto& [n, _] : components) {
    if (n == name) return true;
  }
  return false;
}

void FreezeMask::validate() const {
  for (const auto& [_, t] : components) {
    if (t) return;
  }
  throw TrainError(TrainError::Kind::InvalidConfig, "freeze mask leaves nothing trainable");
}

FreezeMask freeze_mask_for(RunMode mode, std::size_t n_language_adapters) {
  FreezeMask m;
  auto langs = [&](bool trainable) {
    for (std::size_t i = 0; i < n_language_adapters; ++i) {
      m.components.emplace_back("lang_adapter." + std::to_string(i), trainable);
    }
  };
  switch (mode) {
    case RunMode::FullFt:
      m.components = {{"base", true}, {"head", true}};
      break;
    case RunMode::TaskAdapterOnly:
      m.components = {{"base", false}, {"task_adapter", true}, {"head", true}};
      break;
    case RunMode::LangAdapter:
      m.components = {{"base", false}};
      langs(true);
      break;
    case RunMode::TaskOnLang:
      m.components = {{"base", false}};
      langs(false);
      m.components.emplace_back("task_adapter", true);
      m.components.emplace_back("head", true);
      break;
    case RunMode::TaskOnFusion:
      m.components = {{"base", false}};
      langs(false);
      m.components.emplace_back("fusion", true);
      m.components.emplace_back("task_adapter", true);
      m.components.emplace_back("head", true);
      break;
  }
  m.validate();
  return m;
}

template <typename Real>
std::string hash_tensors(const model::NamedTensors<Real>& tensors) {
  Sha256 h;
  for (const auto& [name, t] : tensors) {
    h.update(name);
    h.update(std::string_view("\0", 1));
    h.update(ad::shape_str(t.shape()));
    h.update(std::as_bytes(t.data()));
  }
  return h.hex_digest();
}

template std::string hash_tensors<float>(const model::NamedTensors<float>&);
template std::string hash_tensors<double>(const model::NamedTensors<double>&);

FreezeReport verify_frozen(const Snapshot& before, const Snapshot& after, const FreezeMask& mask,
                           std::size_t steps_taken) {
  FreezeReport r;
  r.trainable_change_checked = steps_taken > 0;
  r.passed = true;
  for (const auto& [name, trainable] : mask.components) {
    ComponentCheck c;
    c.name = name;
    c.trainable = trainable;
    const auto b = before.find(name), a = after.find(name);
    if (b == before.end() || a == after.end()) {
      c.ok = false;
    } else {
      c.changed = b->second != a->second;
      c.ok = trainable ? (c.changed || !r.trainable_change_checked) : !c.changed;
    }
    r.passed = r.passed && c.ok;
    r.components.push_back(std::move(c));
  }
  return r;
}

nlohmann::ordered_json to_json(const FreezeReport& r) {
  nlohmann::ordered_json j;
  j["passed"] = r.passed;
  j["trainable_change_checked"] = r.trainable_change_checked;
  j["components"] = nlohmann::ordered_json::array();
  for (const auto& c : r.components) {
    j["components"].push_back({{"name", c.name}, {"trainable", c.trainable}, {"changed", c.changed}, {"ok", c.ok}});
  }
  return j;
}

}  // namespace kgadapt::train
