// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/cli/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <typeinfo>

#include "CLI11.hpp"
#include "kgadapt/cli/manifest.hpp"
#include "kgadapt/error.hpp"
#include "kgadapt/eval/evaluate.hpp"
#include "kgadapt/experiment/toy.hpp"
#include "kgadapt/kg/conceptnet_client.hpp"
#include "kgadapt/kg/corpus.hpp"
#include "kgadapt/model/checkpoint.hpp"
#include "kgadapt/rng.hpp"
#include "kgadapt/train/task_data.hpp"
#include "kgadapt/train/trainer.hpp"
#include "kgadapt/version.hpp"

namespace kgadapt::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Every TrainConfig / MaskingConfig field as an optional flag, applied last.
struct TrainFlags {
  std::string preset;
  std::string config_file;
  std::optional<double> lr, dropout, p_mlm, p_tlm, replace_mask, replace_random, keep_original, val_fraction;
  std::optional<std::size_t> batch_size, max_steps, epochs, eval_every, reduction_factor;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app, const std::string& default_preset) {
    preset = default_preset;
    app->add_option("--preset", preset, "Hyperparameter preset: sa, ner, lang-cn or lang-wiki")
        ->capture_default_str();
    app->add_option("--config", config_file, "JSON config (or a previous run manifest) layered over the preset");
    app->add_option("--lr", lr, "Learning rate");
    app->add_option("--batch-size", batch_size, "Examples per optimizer step");
    app->add_option("--max-steps", max_steps, "Step budget (0 = use --epochs)");
    app->add_option("--epochs", epochs, "Epoch budget when --max-steps is 0");
    app->add_option("--dropout", dropout, "Dropout probability");
    app->add_option("--seed", seed, "Run seed");
    app->add_option("--eval-every", eval_every, "Validation cadence in steps (0 = once per epoch)");
    app->add_option("--reduction-factor", reduction_factor, "Adapter reduction factor r");
    app->add_option("--val-fraction", val_fraction, "Held-out tail fraction when no split is given");
    app->add_option("--p-mlm", p_mlm, "MLM/FLM selection probability");
    app->add_option("--p-tlm", p_tlm, "TLM selection probability");
    app->add_option("--replace-mask", replace_mask, "Share of selected units replaced by [MASK]");
    app->add_option("--replace-random", replace_random, "Share replaced by a random token");
    app->add_option("--keep-original", keep_original, "Share left unchanged");
  }

  train::TrainConfig resolve(std::optional<train::RunMode> mode) const {
    train::TrainConfig c = train::preset(preset, mode);
    if (!config_file.empty()) c = train::apply_json(c, read_config_file(config_file));
    if (mode) c.mode = *mode;
    if (lr) c.lr = *lr;
    if (batch_size) c.batch_size = *batch_size;
    if (max_steps) c.max_steps = *max_steps;
    if (epochs) c.epochs = *epochs;
    if (dropout) c.dropout_p = *dropout;
    if (seed) c.seed = *seed;
    if (eval_every) c.eval_every = *eval_every;
    if (reduction_factor) c.reduction_factor = *reduction_factor;
    if (val_fraction) c.val_fraction = *val_fraction;
    if (p_mlm) c.masking.p_mlm = *p_mlm;
    if (p_tlm) c.masking.p_tlm = *p_tlm;
    if (replace_mask) c.masking.replace_mask = *replace_mask;
    if (replace_random) c.masking.replace_random = *replace_random;
    if (keep_original) c.masking.keep_original = *keep_original;
    c.validate();
    return c;
  }
};

// Used only when no --base checkpoint is given.
struct EncoderFlags {
  model::EncoderConfig config;
  std::uint64_t base_seed = 0;
  std::string base_path, vocab_path;
  std::vector<CLI::Option*> options;

  void attach(CLI::App* app) {
    options = {
        app->add_option("--base", base_path, "Base encoder checkpoint (default: a fresh random base)"),
        app->add_option("--vocab", vocab_path, "Vocabulary JSON matching --base"),
        app->add_option("--base-seed", base_seed, "Seed of a fresh base")->capture_default_str(),
        app->add_option("--n-layers", config.n_layers, "Encoder layers of a fresh base")->capture_default_str(),
        app->add_option("--d-model", config.d_model, "Hidden width of a fresh base")->capture_default_str(),
        app->add_option("--n-heads", config.n_heads, "Attention heads of a fresh base")->capture_default_str(),
        app->add_option("--d-ff", config.d_ff, "Feed-forward width of a fresh base")->capture_default_str(),
        app->add_option("--vocab-size", config.vocab_size, "Vocabulary size")->capture_default_str(),
        app->add_option("--max-seq-len", config.max_seq_len, "Maximum sequence length")->capture_default_str(),
    };
  }

  // A run manifest passed as --config also supplies the encoder settings,
  // unless any of them is given on the command line.
  void inherit(const std::string& config_file) {
    if (config_file.empty()) return;
    for (const auto* o : options) {
      if (o->count() > 0) return;
    }
    const auto enc = read_manifest_section(config_file, "encoder");
    if (!enc) return;
    if (enc->contains("base") && (*enc)["base"].is_string()) base_path = (*enc)["base"].get<std::string>();
    if (enc->contains("vocab") && (*enc)["vocab"].is_string()) vocab_path = (*enc)["vocab"].get<std::string>();
    if (enc->contains("fresh_base")) config = model::encoder_config_from_json((*enc)["fresh_base"]);
    if (enc->contains("base_seed")) base_seed = (*enc)["base_seed"].get<std::uint64_t>();
  }

  void check() const {
    if (base_path.empty() != vocab_path.empty()) {
      throw CLI::ValidationError("--base and --vocab", "must be given together");
    }
  }
};

struct BaseAndVocab {
  model::BaseWeights<float> base;
  std::optional<text::Vocab> vocab;
  bool fresh = false;
};

BaseAndVocab base_and_vocab(const EncoderFlags& f, const std::vector<std::string>& vocab_corpus) {
  BaseAndVocab r;
  if (!f.base_path.empty()) {
    r.base = model::load_base<float>(f.base_path);
    r.vocab = text::Vocab::load(f.vocab_path);
    if (r.vocab->size() > r.base.config.vocab_size) {
      throw ModelError(ModelError::Kind::ConfigMismatch, "vocabulary " + f.vocab_path + " has " +
                                                             std::to_string(r.vocab->size()) +
                                                             " tokens, more than the base's vocab_size");
    }
    return r;
  }
  text::VocabOptions vo;
  vo.target_size = f.config.vocab_size;
  r.vocab = text::train_vocab(vocab_corpus, vo);
  r.base = model::init_base<float>(f.config, f.base_seed);
  r.fresh = true;
  return r;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IngestError(IngestError::Kind::Io, "cannot write " + path.string());
}

std::string rel(const fs::path& dir, const std::string& name) { return (dir / name).generic_string(); }

ordered_json base_config_json(const EncoderFlags& f) {
  ordered_json j;
  j["base"] = f.base_path.empty() ? ordered_json(nullptr) : ordered_json(f.base_path);
  j["vocab"] = f.vocab_path.empty() ? ordered_json(nullptr) : ordered_json(f.vocab_path);
  if (f.base_path.empty()) {
    j["fresh_base"] = model::to_json(f.config);
    j["base_seed"] = f.base_seed;
  }
  return j;
}

// ---- subcommands ----------------------------------------------------------

struct FetchArgs {
  std::string lang, out, fixture, endpoint = "https://api.conceptnet.io";
  std::size_t page_limit = 1, page_size = 1000;
  std::vector<std::string> relations;
};

int cmd_fetch(const FetchArgs& a, std::ostream& out) {
  kg::FetchOptions opt;
  opt.language = a.lang;
  opt.page_limit = a.page_limit;
  opt.page_size = a.page_size;
  for (const auto& r : a.relations) {
    auto rel = kg::relation_from_name(r);
    if (!rel) throw CLI::ValidationError("--relation", "unknown relation '" + r + "'");
    opt.relation_filter.insert(*rel);
  }
  RunManifest m;
  m.command = "fetch";
  m.tool_version = kVersion;
  m.config = {{"lang", a.lang},
              {"page_limit", a.page_limit},
              {"page_size", a.page_size},
              {"source", a.fixture.empty() ? a.endpoint : a.fixture},
              {"relations", a.relations}};
  if (!a.fixture.empty()) m.add_input(a.fixture);
  m.outputs = {a.out};
  write_manifest(m, a.out + ".manifest.json");

  std::unique_ptr<kg::PageSource> source;
  if (a.fixture.empty()) source = std::make_unique<kg::HttpPageSource>(a.endpoint);
  else source = std::make_unique<kg::FixturePageSource>(a.fixture);
  kg::ExtractStats stats;
  const auto triples = kg::extract_triples(opt, *source, &stats);
  kg::write_triples(triples, a.out);
  ordered_json j;
  j["pages"] = stats.pages;
  j["raw_records"] = stats.raw_records;
  j["kept"] = stats.kept;
  j["skipped"] = {{"unknown_relation", stats.skipped_unknown_relation},
                  {"empty_label", stats.skipped_empty_label},
                  {"missing_language", stats.skipped_missing_language}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct CorpusArgs {
  std::string triples, out, lang;
  bool dedup = false;
};

int cmd_corpus(const CorpusArgs& a, std::ostream& out) {
  const auto triples = kg::load_triples(a.triples);
  kg::CorpusOptions opt;
  opt.dedup = a.dedup;
  opt.lang = a.lang.empty() ? kg::infer_target_language(triples) : a.lang;
  RunManifest m;
  m.command = "corpus";
  m.tool_version = kVersion;
  m.config = {{"lang", opt.lang}, {"dedup", opt.dedup}};
  m.add_input(a.triples);
  m.outputs = {a.out};
  write_manifest(m, a.out + ".manifest.json");

  const auto stats = kg::build_corpus(triples, kg::RelationMapping::standard(), a.out, opt);
  ordered_json j;
  j["sentences"] = stats.sentence_count;
  j["duplicates_dropped"] = stats.duplicates_dropped;
  ordered_json hist;
  for (auto r : kg::kAllRelations) hist[kg::relation_name(r)] = stats.per_relation[static_cast<std::size_t>(r)];
  j["per_relation"] = hist;
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct TrainLaArgs {
  std::string corpus, out = "kgadapt_out/train-la", objective, plain_lang;
  TrainFlags train;
  EncoderFlags enc;
};

int cmd_train_la(const TrainLaArgs& a, std::ostream& out) {
  train::TrainConfig cfg = a.train.resolve(train::RunMode::LangAdapter);
  if (!a.objective.empty()) {
    try {
      cfg.objective = text::objective_from_name(a.objective);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--objective", e.what());
    }
  }
  cfg.validate();
  const auto corpus = kg::load_corpus(a.corpus, a.plain_lang);
  std::vector<std::string> texts;
  for (const auto& r : corpus) texts.push_back(r.text);

  const fs::path dir = a.out;
  RunManifest m;
  m.command = "train-la";
  m.tool_version = kVersion;
  m.seed = cfg.seed;
  m.config = {{"train", train::to_json(cfg)}, {"corpus", a.corpus}, {"encoder", base_config_json(a.enc)}};
  m.add_input(a.corpus);
  if (!a.enc.base_path.empty()) {
    m.add_input(a.enc.base_path);
    m.add_input(a.enc.vocab_path);
  }
  m.outputs = {rel(dir, "adapter.ckpt"), rel(dir, "run_record.jsonl"), rel(dir, "summary.json"),
               rel(dir, "config.json")};
  if (a.enc.base_path.empty()) {
    m.outputs.push_back(rel(dir, "base.ckpt"));
    m.outputs.push_back(rel(dir, "vocab.json"));
  }
  write_manifest(m, dir / "run_manifest.json");

  auto bv = base_and_vocab(a.enc, texts);
  if (bv.fresh) {
    model::save_base(dir / "base.ckpt", bv.base);
    bv.vocab->save(dir / "vocab.json");
  }
  auto result = train::train_language_adapter(corpus, *bv.vocab, cfg, bv.base);
  result.record.best_checkpoint = "adapter.ckpt";
  model::save_adapter(dir / "adapter.ckpt", result.adapter, bv.base.config,
                      {{"objective", std::string(text::objective_name(*cfg.objective))}, {"corpus", a.corpus}});
  train::write_run_record(result.record, cfg, dir / "run_record.jsonl", dir / "summary.json");
  write_text(dir / "config.json", train::to_json(cfg).dump(2) + "\n");
  ordered_json j;
  j["adapter"] = rel(dir, "adapter.ckpt");
  j["best_step"] = result.record.best().step;
  j["best_val_loss"] = result.record.best().val_loss;
  j["masked_token_accuracy"] = result.record.best().val_metric;
  j["freeze_passed"] = result.record.freeze.passed;
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct TrainTaskArgs {
  std::string task, data, out;
  std::vector<std::string> lang_adapters;
  bool fusion = false;
  bool full = false;
  TrainFlags train;
  EncoderFlags enc;
};

int cmd_train_task(const TrainTaskArgs& a, std::ostream& out) {
  const train::Task task = train::task_from_name(a.task);
  std::vector<model::AdapterWeights<float>> adapters;
  train::LanguageSlot slot_shape;
  slot_shape.fusion = a.fusion;
  slot_shape.adapters.assign(a.lang_adapters.size(), nullptr);
  const train::RunMode mode = a.full ? train::RunMode::FullFt : slot_shape.mode();
  if (a.full && (!a.lang_adapters.empty() || a.fusion)) {
    throw CLI::ValidationError("train-full", "does not take language adapters");
  }
  if (!a.lang_adapters.empty() && a.enc.base_path.empty()) {
    throw CLI::ValidationError("--lang-adapter", "needs the --base and --vocab it was trained with");
  }
  TrainFlags flags = a.train;
  if (flags.preset.empty()) flags.preset = a.task;
  const train::TrainConfig cfg = flags.resolve(mode);

  eval::Splits<eval::SaExample> sa;
  eval::Splits<eval::NerExample> ner;
  std::vector<std::string> texts;
  if (task == train::Task::SA) {
    sa = eval::load_sa_dataset(a.data);
    for (const auto& e : sa.train) texts.push_back(e.text);
  } else {
    ner = eval::load_ner_dataset(a.data);
    for (const auto& e : ner.train) {
      std::string line;
      for (const auto& t : e.tokens) line += (line.empty() ? "" : " ") + t;
      texts.push_back(line);
    }
  }

  const fs::path dir = a.out;
  RunManifest m;
  m.command = a.full ? "train-full" : "train-ta";
  m.tool_version = kVersion;
  m.seed = cfg.seed;
  m.config = {{"train", train::to_json(cfg)},
              {"task", a.task},
              {"data", a.data},
              {"language_adapters", a.lang_adapters},
              {"fusion", a.fusion},
              {"encoder", base_config_json(a.enc)}};
  m.add_input(a.data);
  if (!a.enc.base_path.empty()) {
    m.add_input(a.enc.base_path);
    m.add_input(a.enc.vocab_path);
  }
  for (const auto& p : a.lang_adapters) m.add_input(p);
  m.outputs = {rel(dir, "bundle.json"), rel(dir, "run_record.jsonl"), rel(dir, "summary.json"),
               rel(dir, "config.json")};
  write_manifest(m, dir / "run_manifest.json");

  auto bv = base_and_vocab(a.enc, texts);
  for (const auto& p : a.lang_adapters) adapters.push_back(model::load_adapter<float>(p, bv.base.config));
  train::LanguageSlot slot;
  slot.fusion = a.fusion;
  for (const auto& x : adapters) slot.adapters.push_back(&x);

  const train::TaskDataset data = task == train::Task::SA
                                      ? train::encode_sa(sa, *bv.vocab, bv.base.config.max_seq_len)
                                      : train::encode_ner(ner, *bv.vocab, bv.base.config.max_seq_len);
  train::TaskResult result = a.full ? train::train_full_finetune(data, cfg, bv.base)
                                    : train::train_task_adapter(data, cfg, bv.base, slot);

  eval::ModelBundle bundle;
  bundle.task = task;
  bundle.mode = mode;
  bundle.seed = cfg.seed;
  bundle.base = result.base ? std::move(*result.base) : std::move(bv.base);
  bundle.language = std::move(adapters);
  bundle.fusion = std::move(result.fusion);
  bundle.task_adapter = std::move(result.task_adapter);
  bundle.head = std::move(result.head);
  bundle.vocab = std::move(bv.vocab);
  eval::save_bundle(dir, bundle);
  result.record.best_checkpoint = "bundle.json";
  train::write_run_record(result.record, cfg, dir / "run_record.jsonl", dir / "summary.json");
  write_text(dir / "config.json", train::to_json(cfg).dump(2) + "\n");

  ordered_json j;
  j["bundle"] = rel(dir, "bundle.json");
  j["mode"] = train::run_mode_name(mode);
  j["best_step"] = result.record.best().step;
  j["best_val_loss"] = result.record.best().val_loss;
  j[result.record.metric] = result.record.best().val_metric;
  j["freeze_passed"] = result.record.freeze.passed;
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::vector<std::string> runs;
  std::string data, split = "test", out;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (!a.out.empty()) {
    RunManifest m;
    m.command = "eval";
    m.tool_version = kVersion;
    m.config = {{"runs", a.runs}, {"data", a.data}, {"split", a.split}};
    m.add_input(a.data);
    for (const auto& r : a.runs) m.add_input(fs::path(r) / "bundle.json");
    m.outputs = {a.out};
    write_manifest(m, a.out + ".manifest.json");
  }
  std::vector<eval::EvalReport> reports;
  for (const auto& r : a.runs) reports.push_back(eval::evaluate_model(eval::load_bundle(r), a.data, a.split));
  ordered_json j;
  if (reports.size() == 1) {
    j = eval::to_json(reports.front());
  } else {
    j["runs"] = ordered_json::array();
    for (const auto& r : reports) j["runs"].push_back(eval::to_json(r));
    j["aggregate"] = eval::to_json(eval::aggregate_reports(reports));
  }
  if (!a.out.empty()) write_text(a.out, j.dump(2) + "\n");
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct DemoArgs {
  std::uint64_t seed = 7;
  std::string out = "kgadapt_demo", fixtures;
  bool no_fusion = false;
};

int cmd_demo(const DemoArgs& a, std::ostream& out) {
  const fs::path fixtures = a.fixtures.empty() ? experiment::fixtures_dir() : fs::path(a.fixtures);
  auto opt = experiment::default_toy_options(a.seed);
  opt.with_fusion = !a.no_fusion;
  RunManifest m;
  m.command = "demo";
  m.tool_version = kVersion;
  m.seed = a.seed;
  m.config = {{"encoder", model::to_json(opt.encoder)},
              {"kg_adapter", train::to_json(opt.kg_adapter)},
              {"text_adapter", train::to_json(opt.text_adapter)},
              {"task", train::to_json(opt.task)},
              {"with_fusion", opt.with_fusion}};
  for (const auto* p : {"conceptnet/tx", "toy/wiki.txt", "toy/sa.jsonl"}) m.add_input(fixtures / p);
  m.outputs = {rel(a.out, "summary.json")};
  write_manifest(m, fs::path(a.out) / "run_manifest.json");
  const auto data = experiment::load_toy_data(fixtures);
  const auto result = experiment::run_toy_experiment(data, opt, fs::path(a.out));
  out << result.summary(a.seed).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kgadapt: knowledge-graph language adapters for small transformer encoders"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  FetchArgs fa;
  auto* fetch = app.add_subcommand("fetch", "Download ConceptNet edges for a language and extract triples");
  fetch->add_option("--lang", fa.lang, "ISO language code")->required();
  fetch->add_option("--out", fa.out, "Triples JSONL to write")->required();
  fetch->add_option("--fixture", fa.fixture, "Directory of recorded API pages instead of the live endpoint")
      ->check(CLI::ExistingDirectory);
  fetch->add_option("--endpoint", fa.endpoint, "API endpoint")->capture_default_str();
  fetch->add_option("--page-limit", fa.page_limit, "Maximum pages to read")->capture_default_str()
      ->check(CLI::PositiveNumber);
  fetch->add_option("--page-size", fa.page_size, "Edges per page")->capture_default_str()->check(CLI::PositiveNumber);
  fetch->add_option("--relation", fa.relations, "Keep only these relations (repeatable)");

  CorpusArgs ca;
  auto* corpus = app.add_subcommand("corpus", "Verbalize triples into an annotated sentence corpus");
  corpus->add_option("--triples", ca.triples, "Triples JSONL")->required()->check(CLI::ExistingFile);
  corpus->add_option("--out", ca.out, "Corpus JSONL to write")->required();
  corpus->add_option("--lang", ca.lang, "Corpus language tag (default: inferred from the triples)");
  corpus->add_flag("--dedup", ca.dedup, "Drop exact duplicate triples");

  TrainLaArgs la;
  auto* train_la = app.add_subcommand("train-la", "Train a language adapter with MLM, FLM or TLM");
  train_la->add_option("--corpus", la.corpus, "Corpus JSONL or plain-text file")->required()
      ->check(CLI::ExistingFile);
  train_la->add_option("--objective", la.objective, "mlm, flm or tlm (default from the preset)");
  train_la->add_option("--out", la.out, "Output directory")->capture_default_str();
  train_la->add_option("--plain-lang", la.plain_lang, "Language tag for plain-text corpora");
  la.train.attach(train_la, "lang-cn");
  la.enc.attach(train_la);

  TrainTaskArgs ta;
  ta.out = "kgadapt_out/train-ta";
  auto* train_ta = app.add_subcommand("train-ta", "Train a task adapter and head, optionally on language adapters");
  train_ta->add_option("--task", ta.task, "sa or ner")->required()->check(CLI::IsMember({"sa", "ner"}));
  train_ta->add_option("--data", ta.data, "Dataset file or split directory")->required()->check(CLI::ExistingPath);
  train_ta->add_option("--lang-adapter", ta.lang_adapters, "Frozen language adapter checkpoint (repeatable)")
      ->check(CLI::ExistingFile);
  train_ta->add_flag("--fusion", ta.fusion, "Fuse the language adapters with AdapterFusion");
  train_ta->add_option("--out", ta.out, "Output directory")->capture_default_str();
  ta.train.attach(train_ta, "");
  ta.enc.attach(train_ta);

  TrainTaskArgs ff;
  ff.full = true;
  ff.out = "kgadapt_out/train-full";
  auto* train_full = app.add_subcommand("train-full", "Fine-tune the whole encoder and a head on a task");
  train_full->add_option("--task", ff.task, "sa or ner")->required()->check(CLI::IsMember({"sa", "ner"}));
  train_full->add_option("--data", ff.data, "Dataset file or split directory")->required()->check(CLI::ExistingPath);
  train_full->add_option("--out", ff.out, "Output directory")->capture_default_str();
  ff.train.attach(train_full, "");
  ff.enc.attach(train_full);

  EvalArgs ea;
  auto* evalc = app.add_subcommand("eval", "Evaluate trained runs; several runs are averaged");
  evalc->add_option("--run", ea.runs, "Run directory holding bundle.json (repeatable)")->required()
      ->check(CLI::ExistingDirectory);
  evalc->add_option("--data", ea.data, "Dataset file or split directory")->required()->check(CLI::ExistingPath);
  evalc->add_option("--split", ea.split, "train, val or test")->capture_default_str()
      ->check(CLI::IsMember({"train", "val", "test"}));
  evalc->add_option("--out", ea.out, "Report JSON to write");

  DemoArgs da;
  auto* demo = app.add_subcommand("demo", "Run the bundled toy pipeline and compare no-LA, CN-LA and fusion");
  demo->add_option("--seed", da.seed, "Experiment seed")->capture_default_str();
  demo->add_option("--out", da.out, "Output directory")->capture_default_str();
  demo->add_option("--fixtures", da.fixtures, "Fixture directory (default: $KGADAPT_FIXTURES or the bundled set)");
  demo->add_flag("--no-fusion", da.no_fusion, "Skip the plain-text adapter and the fusion arm");

  std::vector<std::string> storage{"kgadapt"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fetch) return cmd_fetch(fa, out);
    if (*corpus) return cmd_corpus(ca, out);
    for (auto* t : {&ta, &ff}) {
      t->enc.inherit(t->train.config_file);
      t->enc.check();
    }
    la.enc.inherit(la.train.config_file);
    la.enc.check();
    if (*train_la) return cmd_train_la(la, out);
    if (*train_ta) return cmd_train_task(ta, out);
    if (*train_full) return cmd_train_task(ff, out);
    if (*evalc) return cmd_eval(ea, out);
    if (*demo) return cmd_demo(da, out);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error[" << e.error_class() << "]: " << e.what() << '\n';
    if (const auto h = e.hint(); !h.empty()) err << "hint: " << h << '\n';
    return kExitDomainError;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error[" << typeid(e).name() << "]: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace kgadapt::cli
