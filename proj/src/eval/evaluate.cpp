// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/eval/evaluate.hpp"

#include <algorithm>
#include <fstream>

#include "kgadapt/error.hpp"
#include "kgadapt/model/checkpoint.hpp"
#include "kgadapt/train/task_data.hpp"

namespace kgadapt::eval {

namespace fs = std::filesystem;

train::TaskModel ModelBundle::view() const {
  train::TaskModel m;
  m.base = &base;
  for (const auto& a : language) m.slot.adapters.push_back(&a);
  m.slot.fusion = fusion.has_value();
  m.fusion = fusion ? &*fusion : nullptr;
  m.task_adapter = task_adapter ? &*task_adapter : nullptr;
  m.head = &head;
  return m;
}

void save_bundle(const fs::path& dir, const ModelBundle& b) {
  fs::create_directories(dir);
  nlohmann::ordered_json j;
  j["task"] = train::task_name(b.task);
  j["mode"] = train::run_mode_name(b.mode);
  j["seed"] = b.seed;
  j["labels"] = b.head.labels;
  model::save_base(dir / "base.ckpt", b.base);
  j["base"] = "base.ckpt";
  j["language_adapters"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < b.language.size(); ++i) {
    const std::string name = "lang_adapter." + std::to_string(i) + ".ckpt";
    model::save_adapter(dir / name, b.language[i], b.base.config);
    j["language_adapters"].push_back(name);
  }
  if (b.fusion) {
    model::save_fusion(dir / "fusion.ckpt", *b.fusion, b.base.config);
    j["fusion"] = "fusion.ckpt";
  } else {
    j["fusion"] = nullptr;
  }
  if (b.task_adapter) {
    model::save_adapter(dir / "task_adapter.ckpt", *b.task_adapter, b.base.config);
    j["task_adapter"] = "task_adapter.ckpt";
  } else {
    j["task_adapter"] = nullptr;
  }
  model::save_head(dir / "head.ckpt", b.head);
  j["head"] = "head.ckpt";
  if (!b.vocab) throw std::invalid_argument("save_bundle: bundle has no vocabulary");
  b.vocab->save(dir / "vocab.json");
  j["vocab"] = "vocab.json";
  std::ofstream out(dir / "bundle.json", std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw IngestError(IngestError::Kind::Io, "cannot write " + (dir / "bundle.json").string());
}

ModelBundle load_bundle(const fs::path& dir) {
  std::ifstream in(dir / "bundle.json", std::ios::binary);
  if (!in) throw IngestError(IngestError::Kind::Io, "no bundle.json in " + dir.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(ModelError::Kind::FormatError, (dir / "bundle.json").string() + ": " + e.what());
  }
  ModelBundle b;
  try {
    b.task = train::task_from_name(j.at("task").get<std::string>());
    b.mode = train::run_mode_from_name(j.at("mode").get<std::string>());
    b.seed = j.at("seed").get<std::uint64_t>();
    b.base = model::load_base<float>(dir / j.at("base").get<std::string>());
    for (const auto& p : j.at("language_adapters")) {
      b.language.push_back(model::load_adapter<float>(dir / p.get<std::string>(), b.base.config));
    }
    if (!j.at("fusion").is_null()) b.fusion = model::load_fusion<float>(dir / j["fusion"].get<std::string>(), b.base.config);
    if (!j.at("task_adapter").is_null()) {
      b.task_adapter = model::load_adapter<float>(dir / j["task_adapter"].get<std::string>(), b.base.config);
    }
    b.head = model::load_head<float>(dir / j.at("head").get<std::string>(), b.base.config.d_model);
    b.vocab = text::Vocab::load(dir / j.at("vocab").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(ModelError::Kind::FormatError, (dir / "bundle.json").string() + ": " + e.what());
  }
  b.view().slot.mode();  // rejects a fusion over fewer than two adapters
  return b;
}

EvalReport evaluate_sa(const train::TaskModel& m, const std::vector<SaExample>& examples, const text::Vocab& vocab) {
  if (m.head->kind != model::HeadKind::SeqCls || m.head->labels != train::sa_label_space()) {
    throw EvalError(EvalError::Kind::ConfigMismatch, "checkpoint head is not a negative/positive classifier");
  }
  const auto encoded = train::encode_sa(examples, vocab, m.base->config.max_seq_len);
  const auto preds = train::predict(m, encoded);
  std::vector<std::string> p, g;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    p.push_back(m.head->labels.at(static_cast<std::size_t>(preds[i][0])));
    g.push_back(examples[i].label);
  }
  return f1_binary(p, g, kPositive);
}

EvalReport evaluate_ner(const train::TaskModel& m, const std::vector<NerExample>& examples, const text::Vocab& vocab) {
  if (m.head->kind != model::HeadKind::TokCls) {
    throw EvalError(EvalError::Kind::ConfigMismatch, "checkpoint head is not a token classifier");
  }
  for (const auto& e : examples) {
    for (const auto& t : e.tags) {
      if (std::find(m.head->labels.begin(), m.head->labels.end(), t) == m.head->labels.end()) {
        throw EvalError(EvalError::Kind::ConfigMismatch, "tag '" + t + "' is outside the checkpoint's tag space");
      }
    }
  }
  const auto encoded = train::encode_ner(examples, vocab, m.base->config.max_seq_len, m.head->labels);
  const auto preds = train::predict(m, encoded);
  std::vector<std::vector<std::string>> p, g;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    std::vector<std::string> row(examples[i].tags.size(), "O");
    // encode_ner skips nothing before truncation, so kept words are a prefix.
    for (std::size_t w = 0; w < preds[i].size() && w < row.size(); ++w) {
      row[w] = m.head->labels.at(static_cast<std::size_t>(preds[i][w]));
    }
    p.push_back(std::move(row));
    g.push_back(examples[i].tags);
  }
  return f1_seqeval(p, g);
}

EvalReport evaluate_model(const ModelBundle& bundle, const fs::path& data, const std::string& split) {
  if (split != "train" && split != "val" && split != "test") {
    throw std::invalid_argument("split must be train, val or test");
  }
  auto pick = [&](auto& splits) -> auto& {
    return split == "train" ? splits.train : split == "val" ? splits.val : splits.test;
  };
  EvalReport r;
  if (bundle.task == train::Task::SA) {
    auto splits = load_sa_dataset(data);
    const auto& part = pick(splits);
    if (part.empty()) throw EvalError(EvalError::Kind::Format, data.string() + ": the " + split + " split is empty");
    r = evaluate_sa(bundle.view(), part, *bundle.vocab);
  } else {
    auto splits = load_ner_dataset(data);
    const auto& part = pick(splits);
    if (part.empty()) throw EvalError(EvalError::Kind::Format, data.string() + ": the " + split + " split is empty");
    r = evaluate_ner(bundle.view(), part, *bundle.vocab);
  }
  r.seed = bundle.seed;
  r.config = train::run_mode_name(bundle.mode);
  return r;
}

void write_report(const EvalReport& report, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << to_json(report).dump(2) << '\n';
  if (!out) throw IngestError(IngestError::Kind::Io, "cannot write " + path.string());
}

EvalReport read_report(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestError::Kind::Io, "cannot open " + path.string());
  try {
    return report_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw EvalError(EvalError::Kind::Format, path.string() + ": " + e.what());
  }
}

}  // namespace kgadapt::eval
