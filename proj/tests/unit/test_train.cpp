// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "kgadapt/error.hpp"
#include "kgadapt/eval/dataset.hpp"
#include "kgadapt/eval/metrics.hpp"
#include "kgadapt/experiment/toy.hpp"
#include "kgadapt/kg/corpus.hpp"
#include "kgadapt/model/weights.hpp"
#include "kgadapt/train/config.hpp"
#include "kgadapt/train/freeze.hpp"
#include "kgadapt/train/task_data.hpp"
#include "kgadapt/train/trainer.hpp"

using namespace kgadapt;
using namespace kgadapt::train;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = KGADAPT_TEST_FIXTURES;

const experiment::ToyData& toy() {
  static const experiment::ToyData data = experiment::load_toy_data(kFixtures);
  return data;
}

model::EncoderConfig small_encoder() {
  model::EncoderConfig c;
  c.n_layers = 2;
  c.d_model = 32;
  c.n_heads = 4;
  c.d_ff = 64;
  c.vocab_size = toy().vocab.size();
  c.max_seq_len = 24;
  c.dropout_p = 0.0;
  return c;
}

const model::BaseWeights<float>& small_base() {
  static const auto base = model::init_base<float>(small_encoder(), 11);
  return base;
}

eval::Splits<eval::SaExample> sa_subset(std::size_t n_train, std::size_t n_val) {
  const auto& sa = toy().sa;
  eval::Splits<eval::SaExample> s;
  s.train.assign(sa.train.begin(), sa.train.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(sa.val.begin(), sa.val.begin() + static_cast<std::ptrdiff_t>(n_val));
  s.test = s.val;
  return s;
}

TaskDataset sa_data(std::size_t n_train, std::size_t n_val) {
  return encode_sa(sa_subset(n_train, n_val), toy().vocab, small_encoder().max_seq_len);
}

TrainConfig task_cfg(RunMode mode, std::size_t steps) {
  TrainConfig c;
  c.mode = mode;
  c.lr = 3e-3;
  c.batch_size = 16;
  c.max_steps = steps;
  c.eval_every = steps;
  c.dropout_p = 0.0;
  c.seed = 5;
  c.reduction_factor = 4;
  return c;
}

TrainConfig la_cfg(text::Objective obj, std::size_t steps) {
  TrainConfig c = task_cfg(RunMode::LangAdapter, steps);
  c.objective = obj;
  return c;
}

std::vector<kg::CorpusRecord> kg_subset(std::size_t n) {
  const auto& all = toy().kg_corpus;
  return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(n, all.size()))};
}

const LanguageAdapterResult& small_adapter(int which) {
  static const auto a = train_language_adapter(kg_subset(64), toy().vocab, la_cfg(text::Objective::MLM, 10), small_base());
  static const auto b = [] {
    auto c = la_cfg(text::Objective::MLM, 10);
    c.seed = 6;
    return train_language_adapter(kg_subset(64), toy().vocab, c, small_base());
  }();
  return which == 0 ? a : b;
}

LanguageSlot slot_for(RunMode mode) {
  switch (mode) {
    case RunMode::TaskOnLang: return LanguageSlot::single(small_adapter(0).adapter);
    case RunMode::TaskOnFusion: return LanguageSlot::fused({&small_adapter(0).adapter, &small_adapter(1).adapter});
    default: return LanguageSlot::none();
  }
}

TaskResult run_task(RunMode mode, const TaskDataset& data, const TrainConfig& cfg) {
  if (mode == RunMode::FullFt) return train_full_finetune(data, cfg, small_base());
  return train_task_adapter(data, cfg, small_base(), slot_for(mode));
}

std::string hash_of(const model::BaseWeights<float>& w) { return hash_tensors(w.named()); }
std::string hash_of(const model::AdapterWeights<float>& w) { return hash_tensors(w.named()); }

TaskModel view_of(const TaskResult& r, RunMode mode, const LanguageSlot& slot) {
  TaskModel m;
  m.base = r.base ? &*r.base : &small_base();
  m.slot = slot;
  m.fusion = r.fusion ? &*r.fusion : nullptr;
  m.task_adapter = r.task_adapter ? &*r.task_adapter : nullptr;
  m.head = &r.head;
  (void)mode;
  return m;
}

double accuracy(const TaskModel& m, const std::vector<EncodedExample>& ex) {
  const auto preds = predict(m, ex);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < ex.size(); ++i) ok += preds[i] == ex[i].labels;
  return static_cast<double>(ok) / static_cast<double>(ex.size());
}

const std::vector<RunMode> kTaskModes{RunMode::FullFt, RunMode::TaskAdapterOnly, RunMode::TaskOnLang,
                                      RunMode::TaskOnFusion};

}  // namespace

TEST_CASE("freeze masks follow the run mode") {
  auto names = [](const FreezeMask& m) {
    std::vector<std::pair<std::string, bool>> v = m.components;
    return v;
  };
  using V = std::vector<std::pair<std::string, bool>>;
  CHECK(names(freeze_mask_for(RunMode::FullFt, 0)) == V{{"base", true}, {"head", true}});
  CHECK(names(freeze_mask_for(RunMode::TaskAdapterOnly, 0)) == V{{"base", false}, {"task_adapter", true}, {"head", true}});
  CHECK(names(freeze_mask_for(RunMode::LangAdapter, 1)) == V{{"base", false}, {"lang_adapter.0", true}});
  CHECK(names(freeze_mask_for(RunMode::TaskOnLang, 1)) ==
        V{{"base", false}, {"lang_adapter.0", false}, {"task_adapter", true}, {"head", true}});
  CHECK(names(freeze_mask_for(RunMode::TaskOnFusion, 2)) ==
        V{{"base", false}, {"lang_adapter.0", false}, {"lang_adapter.1", false}, {"fusion", true},
          {"task_adapter", true}, {"head", true}});
  FreezeMask nothing{{{"base", false}}};
  CHECK_THROWS_AS(nothing.validate(), TrainError);
}

TEST_CASE("verify_frozen semantics") {
  const FreezeMask mask = freeze_mask_for(RunMode::TaskAdapterOnly, 0);
  const Snapshot same{{"base", "a"}, {"task_adapter", "b"}, {"head", "c"}};
  const auto idle = verify_frozen(same, same, mask, 0);
  CHECK(idle.passed);
  CHECK_FALSE(idle.trainable_change_checked);
  CHECK_FALSE(verify_frozen(same, same, mask, 1).passed);
  const Snapshot moved{{"base", "a"}, {"task_adapter", "B"}, {"head", "C"}};
  CHECK(verify_frozen(same, moved, mask, 1).passed);
  const Snapshot leaked{{"base", "A"}, {"task_adapter", "B"}, {"head", "C"}};
  CHECK_FALSE(verify_frozen(same, leaked, mask, 1).passed);
}

TEST_CASE("config validation and presets") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.lr = 0;
  CHECK_THROWS_AS(c.validate(), TrainError);
  c = TrainConfig{};
  c.objective = text::Objective::MLM;
  CHECK_THROWS_AS(c.validate(), TrainError);
  c = TrainConfig{};
  c.mode = RunMode::LangAdapter;
  CHECK_THROWS_AS(c.validate(), TrainError);

  const auto la = preset("lang-cn");
  CHECK(la.lr == 5e-5);
  CHECK(la.batch_size == 16);
  CHECK(la.reduction_factor == 16);
  CHECK(preset("lang-wiki").max_steps == 2 * la.max_steps);
  const auto sa = preset("sa");
  CHECK(sa.batch_size == 64);
  CHECK(sa.lr == 1e-4);
  CHECK(sa.dropout_p == 0.5);
  CHECK(preset("sa", RunMode::TaskOnLang).lr == 1e-5);
  const auto ner = preset("ner");
  CHECK(ner.lr == 2e-4);
  CHECK(ner.dropout_p == 0.2);
  CHECK(preset("ner", RunMode::TaskOnFusion).lr == 1e-4);
  CHECK_THROWS_AS(preset("bogus"), TrainError);
  CHECK_THROWS_AS(preset("sa", RunMode::LangAdapter), TrainError);
  CHECK(apply_json(TrainConfig{}, to_json(la)) == la);

  TrainConfig e;
  e.batch_size = 4;
  e.epochs = 3;
  CHECK(e.steps_per_epoch(10) == 3);
  CHECK(e.total_steps(10) == 9);
  CHECK(e.effective_eval_every(10) == 3);
}

TEST_CASE("ten-step runs pass the freezing contract in every mode") {
  const auto data = sa_data(32, 16);
  for (auto mode : kTaskModes) {
    CAPTURE(run_mode_name(mode));
    const auto slot = slot_for(mode);
    std::vector<std::string> lang_before;
    for (const auto* a : slot.adapters) lang_before.push_back(hash_of(*a));
    const auto base_before = hash_of(small_base());
    const auto r = run_task(mode, data, task_cfg(mode, 10));
    CHECK(r.record.freeze.passed);
    CHECK(r.record.freeze.trainable_change_checked);
    CHECK(hash_of(small_base()) == base_before);
    for (std::size_t i = 0; i < slot.adapters.size(); ++i) CHECK(hash_of(*slot.adapters[i]) == lang_before[i]);
    if (mode == RunMode::FullFt) {
      REQUIRE(r.base.has_value());
      CHECK(hash_of(*r.base) != base_before);
    } else {
      REQUIRE(r.task_adapter.has_value());
    }
    CHECK(r.fusion.has_value() == (mode == RunMode::TaskOnFusion));
  }
  const auto base_before = hash_of(small_base());
  for (auto obj : {text::Objective::MLM, text::Objective::FLM, text::Objective::TLM}) {
    const auto la = train_language_adapter(kg_subset(64), toy().vocab, la_cfg(obj, 10), small_base());
    CHECK(la.record.freeze.passed);
    CHECK(la.record.freeze.trainable_change_checked);
    CHECK(hash_of(small_base()) == base_before);
  }
}

TEST_CASE("replay determinism and record length") {
  const auto data = sa_data(48, 16);
  auto cfg = task_cfg(RunMode::TaskAdapterOnly, 25);
  cfg.eval_every = 10;
  cfg.dropout_p = 0.1;
  const auto a = run_task(RunMode::TaskAdapterOnly, data, cfg);
  const auto b = run_task(RunMode::TaskAdapterOnly, data, cfg);
  CHECK(a.record == b.record);
  CHECK(hash_tensors(a.task_adapter->named()) == hash_tensors(b.task_adapter->named()));
  CHECK(hash_tensors(a.head.named()) == hash_tensors(b.head.named()));
  CHECK(a.record.points.size() == 3);
  CHECK(a.record.step_losses.size() == 25);
  CHECK(a.record.points.back().step == 25);

  auto la = la_cfg(text::Objective::TLM, 12);
  la.eval_every = 5;
  const auto x = train_language_adapter(kg_subset(64), toy().vocab, la, small_base());
  const auto y = train_language_adapter(kg_subset(64), toy().vocab, la, small_base());
  CHECK(x.record == y.record);
  CHECK(hash_of(x.adapter) == hash_of(y.adapter));
  CHECK(x.record.points.size() == 3);
  CHECK(x.record.metric == "masked_token_accuracy");
}

TEST_CASE("the returned weights are the best checkpoint by validation loss") {
  const auto data = sa_data(64, 32);
  for (auto mode : kTaskModes) {
    CAPTURE(run_mode_name(mode));
    auto cfg = task_cfg(mode, 60);
    cfg.eval_every = 10;
    cfg.lr = mode == RunMode::FullFt ? 3e-3 : 1e-2;
    const auto r = run_task(mode, data, cfg);
    double lowest = r.record.points.front().val_loss;
    for (const auto& p : r.record.points) lowest = std::min(lowest, p.val_loss);
    CHECK(r.record.best().val_loss == lowest);
    const auto reloaded = task_loss(view_of(r, mode, slot_for(mode)), data.val);
    CHECK(std::abs(reloaded - lowest) <= 1e-6);
  }
}

TEST_CASE("train loss halves within 300 steps on overfit sets") {
  const auto data = sa_data(16, 8);
  for (auto mode : kTaskModes) {
    CAPTURE(run_mode_name(mode));
    auto cfg = task_cfg(mode, 300);
    cfg.lr = mode == RunMode::FullFt ? 1e-3 : 3e-3;
    const auto r = run_task(mode, data, cfg);
    REQUIRE(r.record.step_losses.size() == 300);
    CHECK(r.record.step_losses.back() < 0.5 * r.record.step_losses.front());
  }
  // Language adapters at the toy encoder size.
  auto enc = experiment::default_toy_options(7).encoder;
  enc.vocab_size = toy().vocab.size();
  enc.dropout_p = 0.0;
  const auto base = model::init_base<float>(enc, 11);
  for (auto obj : {text::Objective::MLM, text::Objective::FLM, text::Objective::TLM}) {
    CAPTURE(text::objective_name(obj));
    auto cfg = la_cfg(obj, 300);
    cfg.val_fraction = 0.0;
    cfg.reduction_factor = 16;
    const auto r = train_language_adapter(kg_subset(16), toy().vocab, cfg, base);
    REQUIRE(r.record.step_losses.size() == 300);
    CHECK(r.record.step_losses.back() < 0.5 * r.record.step_losses.front());
  }
}

TEST_CASE("language adapter loss falls on 200 graph sentences") {
  auto cfg = la_cfg(text::Objective::MLM, 300);
  cfg.eval_every = 100;
  const auto r = train_language_adapter(kg_subset(200), toy().vocab, cfg, small_base());
  CHECK(r.record.points.back().train_loss < r.record.points.front().train_loss);
  CHECK(r.record.step_losses.back() < r.record.step_losses.front());
}

TEST_CASE("separable sentiment set reaches validation F1 0.95 in 200 steps") {
  const auto data = encode_sa(toy().sa, toy().vocab, small_encoder().max_seq_len);
  auto cfg = task_cfg(RunMode::TaskAdapterOnly, 200);
  cfg.lr = 1e-2;
  cfg.batch_size = 32;
  cfg.eval_every = 50;
  const auto r = train_task_adapter(data, cfg, small_base(), LanguageSlot::none());
  MESSAGE("best val F1 " << r.record.best().val_metric);
  const auto preds = predict(view_of(r, RunMode::TaskAdapterOnly, LanguageSlot::none()), data.val);
  std::vector<std::string> p, g;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    p.push_back(data.label_names[static_cast<std::size_t>(preds[i][0])]);
    g.push_back(data.label_names[static_cast<std::size_t>(data.val[i].labels[0])]);
  }
  CHECK(eval::f1_binary(p, g, eval::kPositive).f1 >= 0.95);
}

TEST_CASE("full fine-tuning fits a tiny set within 500 steps") {
  const auto data = sa_data(8, 4);
  auto cfg = task_cfg(RunMode::FullFt, 500);
  cfg.lr = 1e-3;
  cfg.eval_every = 100;
  const auto r = train_full_finetune(data, cfg, small_base());
  REQUIRE(r.base.has_value());
  CHECK(accuracy(view_of(r, RunMode::FullFt, LanguageSlot::none()), data.train) == 1.0);
}

TEST_CASE("training errors") {
  const auto data = sa_data(16, 8);
  const auto wrong = model::init_head<float>(model::HeadKind::SeqCls, {"a", "b", "c"}, 32, 1);
  CHECK_THROWS_AS(train_task_adapter(data, task_cfg(RunMode::TaskAdapterOnly, 5), small_base(), LanguageSlot::none(),
                                     &wrong),
                  TrainError);
  try {
    train_task_adapter(data, task_cfg(RunMode::TaskOnFusion, 5), small_base(),
                       LanguageSlot::fused({&small_adapter(0).adapter}));
    FAIL("expected FusionArity");
  } catch (const ModelError& e) {
    CHECK(e.kind() == ModelError::Kind::FusionArity);
  }
  const auto plain = kg::load_corpus(kFixtures / "plain.jsonl");
  try {
    train_language_adapter(plain, toy().vocab, la_cfg(text::Objective::TLM, 5), small_base());
    FAIL("expected ObjectiveDataMismatch");
  } catch (const TrainError& e) {
    CHECK(e.kind() == TrainError::Kind::ObjectiveDataMismatch);
  }
  CHECK_THROWS_AS(train_language_adapter({}, toy().vocab, la_cfg(text::Objective::MLM, 5), small_base()), Error);
  eval::Splits<eval::SaExample> bad;
  bad.train = {{"a", "neutral"}};
  CHECK_THROWS_AS(encode_sa(bad, toy().vocab, 16), TrainError);
}
