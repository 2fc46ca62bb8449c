// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>

#include "kgadapt/autodiff/adam.hpp"
#include "kgadapt/autodiff/ops.hpp"
#include "kgadapt/error.hpp"
#include "kgadapt/eval/metrics.hpp"
#include "kgadapt/model/encoder.hpp"
#include "kgadapt/rng.hpp"
#include "kgadapt/text/masking.hpp"
#include "kgadapt/text/tokenizer.hpp"

namespace kgadapt::train {

namespace fs = std::filesystem;
using W = Weights;
using T = ad::Tensor<W>;
using model::AdapterStack;
using model::AdapterWeights;
using model::BaseWeights;
using model::FusionWeights;
using model::HeadWeights;

namespace {

// Seed streams kept apart so adding one kind of randomness does not shift
// another.
enum Stream : std::uint64_t { kShuffle = 1, kDropout, kTaskAdapter, kHead, kFusion, kLangAdapter, kValMask };

struct LoopHooks {
  std::size_t n_train = 0;
  std::vector<T> params;
  /// Graph for one training example; returns a scalar loss.
  std::function<T(std::size_t index, std::size_t epoch, std::uint64_t dropout_seed)> example_loss;
  /// (validation loss, validation metric) in eval mode.
  std::function<std::pair<double, double>()> validate;
  std::function<void()> save_best;
  std::function<void()> restore_best;
};

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed({seed, kShuffle, epoch}));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

RunRecord run_loop(const TrainConfig& cfg, RunMode mode, std::string metric, LoopHooks& hooks) {
  RunRecord rec;
  rec.mode = mode;
  rec.metric = std::move(metric);
  const std::size_t n = hooks.n_train;
  const std::size_t total = cfg.total_steps(n);
  const std::size_t every = cfg.effective_eval_every(n);
  if (total == 0) throw TrainError(TrainError::Kind::InvalidConfig, "training budget is zero steps");

  ad::AdamState<W> state(hooks.params, ad::AdamHyper{cfg.lr});
  std::size_t epoch = 0, pos = 0;
  auto order = epoch_order(n, cfg.seed, epoch);
  double best = std::numeric_limits<double>::infinity();
  double window = 0.0;
  std::size_t window_steps = 0;

  for (std::size_t step = 1; step <= total; ++step) {
    if (pos == n) {
      ++epoch;
      pos = 0;
      order = epoch_order(n, cfg.seed, epoch);
    }
    const std::size_t end = std::min(n, pos + cfg.batch_size);
    const W inv_b = static_cast<W>(1.0 / static_cast<double>(end - pos));
    double batch_loss = 0.0;
    for (std::size_t b = 0; pos < end; ++pos, ++b) {
      const T loss = hooks.example_loss(order[pos], epoch, derive_seed({cfg.seed, kDropout, step, b}));
      batch_loss += static_cast<double>(loss.item()) * static_cast<double>(inv_b);
      ad::scale(loss, inv_b).backward();
    }
    if (!std::isfinite(batch_loss)) {
      throw TrainError(TrainError::Kind::InvalidConfig,
                       "training diverged at step " + std::to_string(step) + "; lower the learning rate");
    }
    ad::adam_step<W>(hooks.params, state);
    for (auto& p : hooks.params) p.zero_grad();
    rec.step_losses.push_back(batch_loss);
    window += batch_loss;
    ++window_steps;

    if (step % every == 0 || step == total) {
      const auto [val_loss, val_metric] = hooks.validate();
      rec.points.push_back({step, window / static_cast<double>(window_steps), val_loss, val_metric});
      window = 0.0;
      window_steps = 0;
      if (val_loss < best) {
        best = val_loss;
        rec.best_index = rec.points.size() - 1;
        hooks.save_best();
      }
    }
  }
  // No point improved on +inf only if every validation loss was NaN.
  if (!std::isfinite(best)) {
    throw TrainError(TrainError::Kind::InvalidConfig, "validation loss was never finite");
  }
  hooks.restore_best();
  return rec;
}

template <typename X>
void set_trainable(const X& weights, bool on) {
  model::set_requires_grad<W>(weights.named(), on);
}

template <typename X>
void append_params(std::vector<T>& out, const X& weights) {
  for (auto& t : model::tensors_of<W>(weights.named())) out.push_back(t);
}

// Copies values of `src` into the identically shaped tensors of `dst`.
template <typename X>
void copy_values(const X& src, X& dst) {
  auto s = src.named();
  auto d = dst.named();
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto t = d[i].second;
    std::copy(s[i].second.data().begin(), s[i].second.data().end(), t.mutable_data().begin());
  }
}

template <typename X>
X frozen_copy(const X& w) {
  X c = model::clone(w);
  set_trainable(c, false);
  return c;
}

template <typename X>
X trainable_copy(const X& w) {
  X c = model::clone(w);
  set_trainable(c, true);
  return c;
}

std::size_t val_count(std::size_t n, double fraction) {
  if (n < 2 || fraction <= 0.0) return 0;
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

std::size_t argmax_row(std::span<const W> row) {
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

AdapterStack<W> make_stack(const LanguageSlot& slot, const FusionWeights<W>* fusion,
                           const AdapterWeights<W>* task) {
  if (slot.fusion) {
    if (fusion == nullptr) throw std::invalid_argument("fusion slot without fusion weights");
    return AdapterStack<W>::with_fusion(slot.adapters, *fusion, task);
  }
  if (slot.adapters.size() > 1) {
    throw ModelError(ModelError::Kind::FusionArity, "several language adapters need a fusion slot");
  }
  AdapterStack<W> s;
  s.language = slot.adapters;
  s.task = task;
  return s;
}

void check_label_space(const TaskDataset& data, const HeadWeights<W>& head) {
  const auto want = data.task == Task::SA ? model::HeadKind::SeqCls : model::HeadKind::TokCls;
  if (head.kind != want) {
    throw TrainError(TrainError::Kind::LabelSpace, "head kind " + model::head_kind_name(head.kind) +
                                                       " does not fit a " + task_name(data.task) + " dataset");
  }
  if (head.n_out != data.label_names.size() || (!head.labels.empty() && head.labels != data.label_names)) {
    throw TrainError(TrainError::Kind::LabelSpace, "head has " + std::to_string(head.n_out) +
                                                       " outputs but the dataset has " +
                                                       std::to_string(data.label_names.size()) + " labels");
  }
  for (const auto* split : {&data.train, &data.val, &data.test}) {
    for (const auto& e : *split) {
      for (auto l : e.labels) {
        if (l != text::kIgnore && (l < 0 || static_cast<std::size_t>(l) >= head.n_out)) {
          throw TrainError(TrainError::Kind::LabelSpace, "label id " + std::to_string(l) + " outside the head's " +
                                                             std::to_string(head.n_out) + " outputs");
        }
      }
    }
  }
}

T example_task_loss(const TaskModel& m, const EncodedExample& e, const model::ForwardOptions& opts) {
  const auto stack = make_stack(m.slot, m.fusion, m.task_adapter);
  const T h = model::encoder_forward<W>(e.ids, *m.base, stack, opts);
  return ad::cross_entropy(model::head_forward(h, *m.head), e.labels);
}

double validation_metric(const TaskModel& m, Task task, const std::vector<std::string>& names,
                         const std::vector<EncodedExample>& val) {
  const auto preds = predict(m, val);
  if (task == Task::SA) {
    std::vector<std::string> p, g;
    for (std::size_t i = 0; i < val.size(); ++i) {
      p.push_back(names.at(static_cast<std::size_t>(preds[i][0])));
      g.push_back(names.at(static_cast<std::size_t>(val[i].labels[0])));
    }
    return eval::f1_binary(p, g, eval::kPositive).f1;
  }
  std::vector<std::vector<std::string>> p, g;
  for (std::size_t i = 0; i < val.size(); ++i) {
    std::vector<std::string> ps, gs;
    for (std::size_t w = 0; w < val[i].word_starts.size(); ++w) {
      ps.push_back(names.at(static_cast<std::size_t>(preds[i][w])));
      gs.push_back(names.at(static_cast<std::size_t>(val[i].labels[val[i].word_starts[w]])));
    }
    p.push_back(std::move(ps));
    g.push_back(std::move(gs));
  }
  return eval::f1_seqeval(p, g).f1;
}

struct TaskWorkingSet {
  BaseWeights<W> base;
  std::vector<AdapterWeights<W>> langs;  // frozen
  std::optional<FusionWeights<W>> fusion;
  std::optional<AdapterWeights<W>> task;
  HeadWeights<W> head;
  LanguageSlot slot;

  TaskModel view() const {
    return TaskModel{&base, slot, fusion ? &*fusion : nullptr, task ? &*task : nullptr, &head};
  }

  Snapshot snapshot(const FreezeMask& mask) const {
    Snapshot s;
    for (const auto& [name, _] : mask.components) {
      if (name == "base") s[name] = hash_tensors<W>(base.named());
      else if (name == "fusion") s[name] = hash_tensors<W>(fusion->named());
      else if (name == "task_adapter") s[name] = hash_tensors<W>(task->named());
      else if (name == "head") s[name] = hash_tensors<W>(head.named());
      else s[name] = hash_tensors<W>(langs.at(std::stoul(name.substr(name.find('.') + 1))).named());
    }
    return s;
  }
};

TaskResult run_task(const TaskDataset& data, const TrainConfig& cfg, TaskWorkingSet& ws, RunMode mode) {
  const FreezeMask mask = freeze_mask_for(mode, ws.langs.size());
  const Snapshot before = ws.snapshot(mask);

  std::vector<T> params;
  if (mode == RunMode::FullFt) append_params(params, ws.base);
  if (ws.fusion) append_params(params, *ws.fusion);
  if (ws.task) append_params(params, *ws.task);
  append_params(params, ws.head);

  const auto& val = data.val.empty() ? data.train : data.val;
  const model::ForwardOptions eval_opts{model::Mode::Eval, 0.0, 0};

  // Best weights are kept as value copies of the trainable components.
  std::optional<BaseWeights<W>> best_base;
  std::optional<FusionWeights<W>> best_fusion;
  std::optional<AdapterWeights<W>> best_task;
  std::optional<HeadWeights<W>> best_head;

  LoopHooks hooks;
  hooks.n_train = data.train.size();
  hooks.params = params;
  hooks.example_loss = [&](std::size_t i, std::size_t, std::uint64_t dseed) {
    return example_task_loss(ws.view(), data.train[i], {model::Mode::Train, cfg.dropout_p, dseed});
  };
  hooks.validate = [&] {
    ad::NoGradGuard guard;
    const TaskModel m = ws.view();
    double loss = 0.0;
    for (const auto& e : val) loss += static_cast<double>(example_task_loss(m, e, eval_opts).item());
    return std::pair{loss / static_cast<double>(val.size()), validation_metric(m, data.task, data.label_names, val)};
  };
  hooks.save_best = [&] {
    if (mode == RunMode::FullFt) best_base = model::clone(ws.base);
    if (ws.fusion) best_fusion = model::clone(*ws.fusion);
    if (ws.task) best_task = model::clone(*ws.task);
    best_head = model::clone(ws.head);
  };
  hooks.restore_best = [&] {
    if (best_base) copy_values(*best_base, ws.base);
    if (best_fusion) copy_values(*best_fusion, *ws.fusion);
    if (best_task) copy_values(*best_task, *ws.task);
    copy_values(*best_head, ws.head);
  };

  TaskResult result;
  result.record = run_loop(cfg, mode, data.task == Task::SA ? "f1" : "seqeval_f1", hooks);
  const std::size_t steps = result.record.step_losses.size();
  result.record.freeze = verify_frozen(before, ws.snapshot(mask), mask, steps);
  for (const auto& c : result.record.freeze.components) {
    if (!c.trainable && c.changed) {
      throw TrainError(TrainError::Kind::FreezeViolation, "frozen component '" + c.name + "' changed");
    }
  }

  auto settle = [](auto& w) { set_trainable(w, false); };
  if (mode == RunMode::FullFt) {
    settle(ws.base);
    result.base = std::move(ws.base);
  }
  if (ws.fusion) {
    settle(*ws.fusion);
    result.fusion = std::move(ws.fusion);
  }
  if (ws.task) {
    settle(*ws.task);
    result.task_adapter = std::move(ws.task);
  }
  settle(ws.head);
  result.head = std::move(ws.head);
  return result;
}

HeadWeights<W> starting_head(const TaskDataset& data, const TrainConfig& cfg, std::size_t d_model,
                             const HeadWeights<W>* initial) {
  HeadWeights<W> head = initial != nullptr
                            ? trainable_copy(*initial)
                            : trainable_copy(model::init_head<W>(
                                  data.task == Task::SA ? model::HeadKind::SeqCls : model::HeadKind::TokCls,
                                  data.label_names, d_model, derive_seed({cfg.seed, kHead})));
  check_label_space(data, head);
  return head;
}

void check_task_data(const TaskDataset& data) {
  if (data.train.empty()) throw PipelineError(PipelineError::Kind::EmptyCorpus, "the training split is empty");
  if (data.task == Task::NER) {
    for (const auto* split : {&data.train, &data.val}) {
      for (const auto& e : *split) {
        if (e.word_starts.empty()) {
          throw PipelineError(PipelineError::Kind::NoTargets, "an NER example has no word within max_seq_len");
        }
      }
    }
  }
}

}  // namespace

RunMode LanguageSlot::mode() const {
  if (fusion) {
    if (adapters.size() < 2) {
      throw ModelError(ModelError::Kind::FusionArity,
                       "fusion needs at least 2 language adapters, got " + std::to_string(adapters.size()));
    }
    return RunMode::TaskOnFusion;
  }
  if (adapters.empty()) return RunMode::TaskAdapterOnly;
  if (adapters.size() == 1) return RunMode::TaskOnLang;
  throw ModelError(ModelError::Kind::FusionArity,
                   std::to_string(adapters.size()) + " language adapters given without fusion");
}

double task_loss(const TaskModel& m, const std::vector<EncodedExample>& examples) {
  if (examples.empty()) return 0.0;
  ad::NoGradGuard guard;
  double loss = 0.0;
  for (const auto& e : examples) loss += static_cast<double>(example_task_loss(m, e, {}).item());
  return loss / static_cast<double>(examples.size());
}

std::vector<std::vector<std::int32_t>> predict(const TaskModel& m, const std::vector<EncodedExample>& examples) {
  ad::NoGradGuard guard;
  const auto stack = make_stack(m.slot, m.fusion, m.task_adapter);
  std::vector<std::vector<std::int32_t>> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    const T logits = model::head_forward(model::encoder_forward<W>(e.ids, *m.base, stack), *m.head);
    const std::size_t c = logits.dim(1);
    std::vector<std::int32_t> p;
    if (m.head->kind == model::HeadKind::SeqCls) {
      p.push_back(static_cast<std::int32_t>(argmax_row(logits.data().subspan(0, c))));
    } else {
      for (auto pos : e.word_starts) {
        p.push_back(static_cast<std::int32_t>(argmax_row(logits.data().subspan(pos * c, c))));
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

struct MlmData {
  std::vector<text::TokenizedSentence> sentences;
  std::size_t n_train = 0;
  std::vector<text::MaskedExample> val_masks;  // fixed once so every eval point scores the same task
};

MlmData prepare_mlm(const std::vector<kg::CorpusRecord>& corpus, const text::Vocab& vocab, const TrainConfig& cfg,
                    text::Objective objective, const BaseWeights<W>& base) {
  if (corpus.empty()) throw PipelineError(PipelineError::Kind::EmptyCorpus, "the masked-LM corpus is empty");
  if (objective == text::Objective::TLM) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (!corpus[i].has_spans()) {
        throw TrainError(TrainError::Kind::ObjectiveDataMismatch,
                         "TLM needs subject/predicate/object spans but corpus record " + std::to_string(i) +
                             " is plain text");
      }
    }
  }
  if (vocab.size() > base.config.vocab_size) {
    throw ModelError(ModelError::Kind::ConfigMismatch, "vocabulary of " + std::to_string(vocab.size()) +
                                                           " tokens exceeds the encoder's vocab_size " +
                                                           std::to_string(base.config.vocab_size));
  }
  MlmData d;
  for (const auto& r : corpus) {
    auto ts = r.has_spans() ? text::tokenize(kg::to_annotated(r), vocab) : text::tokenize(r.text, vocab);
    ts = text::truncate(ts, base.config.max_seq_len);
    if (ts.word_boundaries.empty()) continue;
    if (objective == text::Objective::TLM && !ts.has_targets()) continue;
    d.sentences.push_back(std::move(ts));
  }
  if (d.sentences.empty()) {
    throw PipelineError(PipelineError::Kind::NoTargets, "no corpus sentence has maskable words");
  }
  const std::size_t n_val = val_count(d.sentences.size(), cfg.val_fraction);
  d.n_train = d.sentences.size() - n_val;
  const std::size_t val_begin = n_val > 0 ? d.n_train : 0;
  for (std::size_t i = val_begin; i < d.sentences.size(); ++i) {
    d.val_masks.push_back(text::mask(objective, d.sentences[i], cfg.masking, vocab.size(),
                                     derive_seed({cfg.seed, kValMask, i})));
  }
  return d;
}

RunRecord run_mlm(const MlmData& d, const TrainConfig& cfg, text::Objective objective, std::size_t vocab_size,
                  const BaseWeights<W>& base, const HeadWeights<W>& head, const AdapterStack<W>& stack,
                  RunMode mode, LoopHooks& hooks) {
  hooks.n_train = d.n_train;
  hooks.example_loss = [&](std::size_t i, std::size_t epoch, std::uint64_t dseed) {
    const auto m = text::mask(objective, d.sentences[i], cfg.masking, vocab_size, derive_seed({cfg.seed, epoch, i}));
    const T h = model::encoder_forward<W>(m.input_ids, base, stack, {model::Mode::Train, cfg.dropout_p, dseed});
    return ad::cross_entropy(model::head_forward(h, head), m.labels);
  };
  hooks.validate = [&] {
    ad::NoGradGuard guard;
    double loss = 0.0;
    std::size_t correct = 0, total = 0;
    for (const auto& m : d.val_masks) {
      const T logits = model::head_forward(model::encoder_forward<W>(m.input_ids, base, stack), head);
      loss += static_cast<double>(ad::cross_entropy(logits, m.labels).item());
      const std::size_t v = logits.dim(1);
      for (std::size_t p = 0; p < m.labels.size(); ++p) {
        if (m.labels[p] == text::kIgnore) continue;
        ++total;
        correct += argmax_row(logits.data().subspan(p * v, v)) == static_cast<std::size_t>(m.labels[p]);
      }
    }
    return std::pair{loss / static_cast<double>(d.val_masks.size()), eval::safe_ratio(correct, total)};
  };
  return run_loop(cfg, mode, "masked_token_accuracy", hooks);
}

}  // namespace

LanguageAdapterResult train_language_adapter(const std::vector<kg::CorpusRecord>& corpus, const text::Vocab& vocab,
                                             const TrainConfig& cfg, const BaseWeights<W>& base) {
  cfg.validate();
  if (cfg.mode != RunMode::LangAdapter) {
    throw TrainError(TrainError::Kind::InvalidConfig, "train_language_adapter needs mode lang_adapter, got " +
                                                          run_mode_name(cfg.mode));
  }
  const text::Objective objective = *cfg.objective;
  const MlmData data = prepare_mlm(corpus, vocab, cfg, objective, base);

  const BaseWeights<W> frozen_base = frozen_copy(base);
  const HeadWeights<W> head = model::mlm_head(frozen_base);
  AdapterWeights<W> adapter = trainable_copy(model::init_adapter<W>(
      base.config, cfg.reduction_factor, derive_seed({cfg.seed, kLangAdapter})));

  const FreezeMask mask = freeze_mask_for(RunMode::LangAdapter, 1);
  auto snapshot = [&] {
    return Snapshot{{"base", hash_tensors<W>(frozen_base.named())},
                    {"lang_adapter.0", hash_tensors<W>(adapter.named())}};
  };
  const Snapshot before = snapshot();
  const auto stack = AdapterStack<W>::with_language(adapter);
  std::optional<AdapterWeights<W>> best;

  LoopHooks hooks;
  append_params(hooks.params, adapter);
  hooks.save_best = [&] { best = model::clone(adapter); };
  hooks.restore_best = [&] { copy_values(*best, adapter); };

  LanguageAdapterResult result;
  result.record = run_mlm(data, cfg, objective, vocab.size(), frozen_base, head, stack, RunMode::LangAdapter, hooks);
  result.record.freeze = verify_frozen(before, snapshot(), mask, result.record.step_losses.size());
  if (result.record.freeze.components.front().changed) {
    throw TrainError(TrainError::Kind::FreezeViolation, "base weights changed during language-adapter training");
  }
  set_trainable(adapter, false);
  result.adapter = std::move(adapter);
  return result;
}

TaskResult train_task_adapter(const TaskDataset& data, const TrainConfig& cfg, const BaseWeights<W>& base,
                              const LanguageSlot& slot, const HeadWeights<W>* initial_head) {
  cfg.validate();
  const RunMode mode = slot.mode();
  if (cfg.mode != mode) {
    throw TrainError(TrainError::Kind::InvalidConfig, "config mode " + run_mode_name(cfg.mode) +
                                                          " does not match the language slot (" +
                                                          run_mode_name(mode) + ")");
  }
  check_task_data(data);
  TaskWorkingSet ws;
  ws.base = frozen_copy(base);
  for (const auto* a : slot.adapters) ws.langs.push_back(frozen_copy(*a));
  ws.slot.fusion = slot.fusion;
  for (const auto& a : ws.langs) ws.slot.adapters.push_back(&a);
  if (slot.fusion) {
    ws.fusion = trainable_copy(model::init_fusion<W>(base.config, derive_seed({cfg.seed, kFusion})));
  }
  ws.task = trainable_copy(
      model::init_adapter<W>(base.config, cfg.reduction_factor, derive_seed({cfg.seed, kTaskAdapter})));
  ws.head = starting_head(data, cfg, base.config.d_model, initial_head);
  make_stack(ws.slot, ws.fusion ? &*ws.fusion : nullptr, &*ws.task).validate(base.config);
  return run_task(data, cfg, ws, mode);
}

TaskResult train_full_finetune(const TaskDataset& data, const TrainConfig& cfg, const BaseWeights<W>& base,
                               const HeadWeights<W>* initial_head) {
  cfg.validate();
  if (cfg.mode != RunMode::FullFt) {
    throw TrainError(TrainError::Kind::InvalidConfig,
                     "train_full_finetune needs mode full_ft, got " + run_mode_name(cfg.mode));
  }
  check_task_data(data);
  TaskWorkingSet ws;
  ws.base = trainable_copy(base);
  ws.head = starting_head(data, cfg, base.config.d_model, initial_head);
  return run_task(data, cfg, ws, RunMode::FullFt);
}

std::string to_jsonl(const RunRecord& r) {
  std::string out;
  for (const auto& p : r.points) {
    nlohmann::ordered_json j;
    j["step"] = p.step;
    j["train_loss"] = p.train_loss;
    j["val_loss"] = p.val_loss;
    j["val_metric"] = p.val_metric;
    out += j.dump();
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json summary_json(const RunRecord& r, const TrainConfig& cfg) {
  nlohmann::ordered_json j;
  j["mode"] = run_mode_name(r.mode);
  j["config"] = to_json(cfg);
  j["metric"] = r.metric;
  j["n_points"] = r.points.size();
  j["steps"] = r.step_losses.size();
  if (!r.points.empty()) {
    j["best_step"] = r.best().step;
    j["best_val_loss"] = r.best().val_loss;
    j["best_val_metric"] = r.best().val_metric;
  }
  j["best_checkpoint"] = r.best_checkpoint;
  if (!r.step_losses.empty()) {
    j["initial_train_loss"] = r.step_losses.front();
    j["final_train_loss"] = r.step_losses.back();
  }
  j["train_losses"] = r.step_losses;
  j["freeze"] = to_json(r.freeze);
  return j;
}

void write_run_record(const RunRecord& r, const TrainConfig& cfg, const fs::path& jsonl, const fs::path& summary) {
  for (const auto& p : {jsonl, summary}) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
  }
  std::ofstream a(jsonl, std::ios::binary | std::ios::trunc);
  a << to_jsonl(r);
  std::ofstream b(summary, std::ios::binary | std::ios::trunc);
  b << summary_json(r, cfg).dump(2) << '\n';
  if (!a || !b) throw IngestError(IngestError::Kind::Io, "cannot write run record to " + jsonl.string());
}

}  // namespace kgadapt::train
