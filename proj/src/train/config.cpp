// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/train/config.hpp"

#include <set>

#include "kgadapt/error.hpp"

namespace kgadapt::train {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw TrainError(TrainError::Kind::InvalidConfig, what); }

}  // namespace

std::string run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::FullFt: return "full_ft";
    case RunMode::TaskAdapterOnly: return "task_adapter_only";
    case RunMode::LangAdapter: return "lang_adapter";
    case RunMode::TaskOnLang: return "task_on_lang";
    case RunMode::TaskOnFusion: return "task_on_fusion";
  }
  return "?";
}

RunMode run_mode_from_name(const std::string& name) {
  for (auto m : {RunMode::FullFt, RunMode::TaskAdapterOnly, RunMode::LangAdapter, RunMode::TaskOnLang,
                 RunMode::TaskOnFusion}) {
    if (run_mode_name(m) == name) return m;
  }
  invalid("unknown mode '" + name + "'");
}

bool is_task_mode(RunMode m) { return m != RunMode::LangAdapter; }

std::string task_name(Task t) { return t == Task::SA ? "sa" : "ner"; }

Task task_from_name(const std::string& name) {
  if (name == "sa") return Task::SA;
  if (name == "ner") return Task::NER;
  invalid("unknown task '" + name + "' (expected sa or ner)");
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) invalid("lr must be positive");
  if (batch_size == 0) invalid("batch_size must be positive");
  if (max_steps == 0 && epochs == 0) invalid("either max_steps or epochs must be positive");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) invalid("dropout_p must lie in [0, 1)");
  if (reduction_factor == 0) invalid("reduction_factor must be positive");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) invalid("val_fraction must lie in [0, 1)");
  if (mode == RunMode::LangAdapter && !objective) invalid("lang_adapter mode needs an objective (mlm, flm or tlm)");
  if (mode != RunMode::LangAdapter && objective) {
    invalid("an objective is only meaningful in lang_adapter mode, not " + run_mode_name(mode));
  }
  try {
    masking.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
}

std::size_t TrainConfig::steps_per_epoch(std::size_t n_train) const {
  return n_train == 0 ? 0 : (n_train + batch_size - 1) / batch_size;
}

std::size_t TrainConfig::total_steps(std::size_t n_train) const {
  return max_steps > 0 ? max_steps : epochs * steps_per_epoch(n_train);
}

std::size_t TrainConfig::effective_eval_every(std::size_t n_train) const {
  if (eval_every > 0) return eval_every;
  return std::max<std::size_t>(1, steps_per_epoch(n_train));
}

nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["mode"] = run_mode_name(c.mode);
  j["objective"] = c.objective ? nlohmann::ordered_json(std::string(text::objective_name(*c.objective)))
                               : nlohmann::ordered_json(nullptr);
  j["lr"] = c.lr;
  j["batch_size"] = c.batch_size;
  j["max_steps"] = c.max_steps;
  j["epochs"] = c.epochs;
  j["dropout_p"] = c.dropout_p;
  j["seed"] = c.seed;
  j["eval_every"] = c.eval_every;
  j["reduction_factor"] = c.reduction_factor;
  j["masking"] = {{"p_mlm", c.masking.p_mlm},
                  {"p_tlm", c.masking.p_tlm},
                  {"replace_mask", c.masking.replace_mask},
                  {"replace_random", c.masking.replace_random},
                  {"keep_original", c.masking.keep_original}};
  j["val_fraction"] = c.val_fraction;
  return j;
}

TrainConfig apply_json(TrainConfig c, const nlohmann::json& j) {
  if (!j.is_object()) invalid("training config must be a JSON object");
  static const std::set<std::string> known{"mode",       "objective",        "lr",      "batch_size",
                                           "max_steps",  "epochs",           "dropout_p", "seed",
                                           "eval_every", "reduction_factor", "masking", "val_fraction"};
  try {
    for (const auto& [key, value] : j.items()) {
      if (!known.count(key)) invalid("unknown training config key '" + key + "'");
      if (key == "mode") c.mode = run_mode_from_name(value.get<std::string>());
      else if (key == "objective") {
        if (value.is_null()) c.objective.reset();
        else {
          try {
            c.objective = text::objective_from_name(value.get<std::string>());
          } catch (const std::invalid_argument& e) {
            invalid(e.what());
          }
        }
      } else if (key == "lr") c.lr = value.get<double>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "max_steps") c.max_steps = value.get<std::size_t>();
      else if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "dropout_p") c.dropout_p = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "eval_every") c.eval_every = value.get<std::size_t>();
      else if (key == "reduction_factor") c.reduction_factor = value.get<std::size_t>();
      else if (key == "val_fraction") c.val_fraction = value.get<double>();
      else if (key == "masking") {
        if (!value.is_object()) invalid("masking must be an object");
        for (const auto& [mk, mv] : value.items()) {
          if (mk == "p_mlm") c.masking.p_mlm = mv.get<double>();
          else if (mk == "p_tlm") c.masking.p_tlm = mv.get<double>();
          else if (mk == "replace_mask") c.masking.replace_mask = mv.get<double>();
          else if (mk == "replace_random") c.masking.replace_random = mv.get<double>();
          else if (mk == "keep_original") c.masking.keep_original = mv.get<double>();
          else invalid("unknown masking key '" + mk + "'");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("training config: ") + e.what());
  }
  return c;
}

TrainConfig preset(const std::string& name, std::optional<RunMode> mode) {
  TrainConfig c;
  if (name == "lang-cn" || name == "lang-wiki") {
    if (mode && *mode != RunMode::LangAdapter) invalid("preset " + name + " is for lang_adapter runs");
    c.mode = RunMode::LangAdapter;
    c.objective = text::Objective::MLM;
    c.lr = 5e-5;
    c.batch_size = 16;
    c.reduction_factor = 16;
    // Same 1:2 step ratio between the two corpora as the full-scale runs.
    c.max_steps = name == "lang-cn" ? 1000 : 2000;
    c.eval_every = 100;
    c.dropout_p = 0.1;
    return c;
  }
  if (name == "sa" || name == "ner") {
    c.mode = mode.value_or(RunMode::TaskAdapterOnly);
    if (c.mode == RunMode::LangAdapter) invalid("preset " + name + " is for task runs");
    const bool stacked = c.mode == RunMode::TaskOnLang || c.mode == RunMode::TaskOnFusion;
    c.batch_size = 64;
    c.reduction_factor = 16;
    if (name == "sa") {
      c.lr = stacked ? 1e-5 : 1e-4;
      c.epochs = 50;
      c.dropout_p = 0.5;
    } else {
      c.lr = stacked ? 1e-4 : 2e-4;
      c.epochs = 100;
      c.dropout_p = 0.2;
    }
    return c;
  }
  invalid("unknown preset '" + name + "' (expected sa, ner, lang-cn or lang-wiki)");
}

}  // namespace kgadapt::train
