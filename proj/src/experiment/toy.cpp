// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/experiment/toy.hpp"

#include <cstdlib>
#include <fstream>

#include "kgadapt/error.hpp"
#include "kgadapt/eval/evaluate.hpp"
#include "kgadapt/kg/conceptnet_client.hpp"
#include "kgadapt/model/checkpoint.hpp"
#include "kgadapt/model/weights.hpp"
#include "kgadapt/rng.hpp"
#include "kgadapt/train/task_data.hpp"

#ifndef KGADAPT_DEFAULT_FIXTURES
#define KGADAPT_DEFAULT_FIXTURES "fixtures"
#endif

namespace kgadapt::experiment {

namespace fs = std::filesystem;
using train::RunMode;

fs::path fixtures_dir() {
  if (const char* env = std::getenv("KGADAPT_FIXTURES"); env != nullptr && *env != '\0') return env;
  return KGADAPT_DEFAULT_FIXTURES;
}

namespace {

constexpr const char* kToyLanguage = "tx";

text::Vocab build_vocab(const std::vector<kg::CorpusRecord>& a, const std::vector<kg::CorpusRecord>& b,
                        const std::vector<eval::SaExample>& sa) {
  std::vector<std::string> lines;
  for (const auto* part : {&a, &b}) {
    for (const auto& r : *part) lines.push_back(r.text);
  }
  for (const auto& e : sa) lines.push_back(e.text);
  return text::train_vocab(lines, text::VocabOptions{});
}

}  // namespace

ToyData load_toy_data(const fs::path& fixtures) {
  kg::FixturePageSource pages(fixtures / "conceptnet" / kToyLanguage);
  kg::FetchOptions fetch;
  fetch.language = kToyLanguage;
  fetch.page_limit = pages.page_count();
  kg::ExtractStats stats;
  const auto triples = kg::extract_triples(fetch, pages, &stats);

  std::vector<kg::CorpusRecord> kg_corpus;
  const auto& mapping = kg::RelationMapping::standard();
  for (const auto& t : triples) kg_corpus.push_back(kg::to_record(kg::verbalize(t, mapping), kToyLanguage));

  std::vector<kg::CorpusRecord> text_corpus = kg::load_corpus(fixtures / "toy" / "wiki.txt", kToyLanguage);
  auto sa = eval::load_sa_dataset(fixtures / "toy" / "sa.jsonl");
  text::Vocab vocab = build_vocab(kg_corpus, text_corpus, sa.train);
  return ToyData{std::move(kg_corpus), std::move(text_corpus), std::move(sa), std::move(vocab), stats};
}

ToyOptions default_toy_options(std::uint64_t seed) {
  ToyOptions o;
  o.seed = seed;

  o.kg_adapter.mode = RunMode::LangAdapter;
  o.kg_adapter.objective = text::Objective::MLM;
  o.kg_adapter.lr = 1e-3;
  o.kg_adapter.batch_size = 16;
  o.kg_adapter.max_steps = 150;
  o.kg_adapter.eval_every = 50;
  o.kg_adapter.dropout_p = 0.1;
  o.kg_adapter.seed = derive_seed({seed, 1});

  // Twice the graph adapter's budget, as with the full-scale corpora.
  o.text_adapter = o.kg_adapter;
  o.text_adapter.max_steps = 2 * o.kg_adapter.max_steps;
  o.text_adapter.eval_every = 100;
  o.text_adapter.seed = derive_seed({seed, 2});

  o.task.lr = 3e-3;
  o.task.batch_size = 32;
  o.task.max_steps = 600;
  o.task.eval_every = 100;
  o.task.dropout_p = 0.1;
  o.task.seed = derive_seed({seed, 3});
  return o;
}

const ToyArm& ToyResult::arm(const std::string& name) const {
  for (const auto& a : arms) {
    if (a.name == name) return a;
  }
  throw std::out_of_range("no toy arm named " + name);
}

nlohmann::ordered_json ToyResult::summary(std::uint64_t seed) const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["arms"] = nlohmann::ordered_json::array();
  for (const auto& a : arms) {
    nlohmann::ordered_json x;
    x["name"] = a.name;
    x["mode"] = train::run_mode_name(a.mode);
    x["best_step"] = a.record.best().step;
    x["best_val_loss"] = a.record.best().val_loss;
    x["val"] = eval::to_json(a.val);
    x["test"] = eval::to_json(a.test);
    j["arms"].push_back(std::move(x));
  }
  return j;
}

ToyResult run_toy_experiment(const ToyData& data, const ToyOptions& options, const std::optional<fs::path>& out_dir) {
  model::EncoderConfig enc = options.encoder;
  enc.validate();
  if (data.vocab.size() > enc.vocab_size) {
    throw ModelError(ModelError::Kind::ConfigMismatch, "toy vocabulary of " + std::to_string(data.vocab.size()) +
                                                           " tokens does not fit vocab_size " +
                                                           std::to_string(enc.vocab_size));
  }
  const auto base = model::init_base<float>(enc, derive_seed({options.seed, 0}));
  const auto task_data = train::encode_sa(data.sa, data.vocab, enc.max_seq_len);

  ToyResult result;
  auto kg_la = train::train_language_adapter(data.kg_corpus, data.vocab, options.kg_adapter, base);
  result.adapter_records.push_back(kg_la.record);
  std::optional<train::LanguageAdapterResult> text_la;
  if (options.with_fusion) {
    text_la = train::train_language_adapter(data.text_corpus, data.vocab, options.text_adapter, base);
    result.adapter_records.push_back(text_la->record);
  }

  if (out_dir) {
    fs::create_directories(*out_dir);
    data.vocab.save(*out_dir / "vocab.json");
    model::save_base(*out_dir / "base.ckpt", base);
    model::save_adapter(*out_dir / "la_cn" / "adapter.ckpt", kg_la.adapter, enc, {{"objective", "mlm"}});
    train::write_run_record(kg_la.record, options.kg_adapter, *out_dir / "la_cn" / "run_record.jsonl",
                            *out_dir / "la_cn" / "summary.json");
    if (text_la) {
      model::save_adapter(*out_dir / "la_wiki" / "adapter.ckpt", text_la->adapter, enc, {{"objective", "mlm"}});
      train::write_run_record(text_la->record, options.text_adapter, *out_dir / "la_wiki" / "run_record.jsonl",
                              *out_dir / "la_wiki" / "summary.json");
    }
  }

  struct Plan {
    std::string name;
    train::LanguageSlot slot;
  };
  std::vector<Plan> plans{{"no_la", train::LanguageSlot::none()}, {"cn_la", train::LanguageSlot::single(kg_la.adapter)}};
  if (text_la) plans.push_back({"fusion", train::LanguageSlot::fused({&kg_la.adapter, &text_la->adapter})});

  for (const auto& plan : plans) {
    train::TrainConfig cfg = options.task;
    cfg.mode = plan.slot.mode();
    auto trained = train::train_task_adapter(task_data, cfg, base, plan.slot);

    eval::ModelBundle bundle;
    bundle.task = train::Task::SA;
    bundle.mode = cfg.mode;
    bundle.seed = options.seed;
    bundle.base = base;
    for (const auto* a : plan.slot.adapters) bundle.language.push_back(*a);
    bundle.fusion = trained.fusion;
    bundle.task_adapter = trained.task_adapter;
    bundle.head = trained.head;
    bundle.vocab = data.vocab;

    ToyArm arm;
    arm.name = plan.name;
    arm.mode = cfg.mode;
    arm.val = eval::evaluate_sa(bundle.view(), data.sa.val, data.vocab);
    arm.test = eval::evaluate_sa(bundle.view(), data.sa.test, data.vocab);
    for (auto* r : {&arm.val, &arm.test}) {
      r->seed = options.seed;
      r->config = plan.name;
    }
    if (out_dir) {
      const fs::path dir = *out_dir / plan.name;
      trained.record.best_checkpoint = plan.name + "/bundle.json";
      eval::save_bundle(dir, bundle);
      train::write_run_record(trained.record, cfg, dir / "run_record.jsonl", dir / "summary.json");
    }
    arm.record = std::move(trained.record);
    result.arms.push_back(std::move(arm));
  }
  if (out_dir) {
    std::ofstream out(*out_dir / "summary.json", std::ios::binary | std::ios::trunc);
    out << result.summary(options.seed).dump(2) << '\n';
    if (!out) throw IngestError(IngestError::Kind::Io, "cannot write " + (*out_dir / "summary.json").string());
  }
  return result;
}

}  // namespace kgadapt::experiment
