// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "kgadapt/error.hpp"
#include "kgadapt/eval/dataset.hpp"
#include "kgadapt/eval/evaluate.hpp"
#include "kgadapt/eval/metrics.hpp"
#include "kgadapt/experiment/toy.hpp"
#include "kgadapt/model/weights.hpp"
#include "kgadapt/rng.hpp"
#include "support/span_oracle.hpp"

using namespace kgadapt;
using namespace kgadapt::eval;
namespace fs = std::filesystem;
using Tags = std::vector<std::string>;
using testing::brute_counts;
using testing::brute_spans;

namespace {

const fs::path kFixtures = KGADAPT_TEST_FIXTURES;

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "kgadapt_eval_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

Tags random_tags(Rng& rng, std::size_t n) {
  static const Tags alphabet{"O", "B-PER", "I-PER", "B-LOC", "I-LOC"};
  Tags t;
  for (std::size_t i = 0; i < n; ++i) t.push_back(alphabet[rng.below(alphabet.size())]);
  return t;
}

}  // namespace

TEST_CASE("binary F1 examples") {
  const Tags all{"positive", "negative", "positive"};
  CHECK(f1_binary(all, all, kPositive).f1 == 1.0);
  // TP=2, FP=1, FN=1.
  const auto r = f1_binary({"positive", "positive", "positive", "negative", "negative"},
                           {"positive", "positive", "negative", "positive", "negative"}, kPositive);
  CHECK(r.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  REQUIRE(r.macro_f1.has_value());
  CHECK(*r.macro_f1 == doctest::Approx((2.0 / 3.0 + 0.5) / 2.0));
  const auto none = f1_binary({"negative", "negative"}, {"negative", "negative"}, kPositive);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK_THROWS_AS(f1_binary({"positive"}, {}, kPositive), EvalError);
  CHECK_THROWS_AS(f1_binary({}, {}, kPositive), EvalError);
  CHECK(f1_score(0, 0) == 0.0);
  CHECK(safe_ratio(1, 0) == 0.0);
}

TEST_CASE("entity extraction") {
  CHECK(extract_entities({"B-PER", "I-PER", "O", "B-LOC"}) == std::vector<Entity>{{"PER", 0, 2}, {"LOC", 3, 4}});
  CHECK(extract_entities({"O", "O"}).empty());
  CHECK(extract_entities({"I-PER", "O"}) == std::vector<Entity>{{"PER", 0, 1}});
  CHECK(extract_entities({"B-PER", "I-LOC"}) == std::vector<Entity>{{"PER", 0, 1}, {"LOC", 1, 2}});
  CHECK(extract_entities({"B-PER", "B-PER"}) == std::vector<Entity>{{"PER", 0, 1}, {"PER", 1, 2}});
  CHECK_THROWS_AS(extract_entities({"X-PER"}), EvalError);
  CHECK_THROWS_AS(extract_entities({"B-"}), EvalError);
}

TEST_CASE("seqeval F1 examples") {
  const auto r = f1_seqeval({{"B-PER", "I-PER", "O", "O"}}, {{"B-PER", "I-PER", "O", "B-LOC"}});
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 0.5);
  CHECK(std::abs(r.f1 - 2.0 / 3.0) <= 1e-12);
  const std::vector<Tags> gold{{"B-PER", "O"}, {"B-LOC", "I-LOC"}};
  CHECK(f1_seqeval(gold, gold).f1 == 1.0);
  const auto zero = f1_seqeval({{"O", "O"}, {"O", "O"}}, gold);
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f1 == 0.0);
  try {
    f1_seqeval({{"O"}, {"O"}}, {{"O"}, {"O", "O"}});
    FAIL("expected Alignment");
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalError::Kind::Alignment);
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("seqeval matches the brute-force span oracle") {
  Rng rng(42);
  std::vector<Tags> all_p, all_g;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.below(8);
    const auto p = random_tags(rng, n);
    const auto g = random_tags(rng, n);
    const auto mine = extract_entities(p);
    CHECK(std::set<Entity>(mine.begin(), mine.end()) == brute_spans(p));
    all_p.push_back(p);
    all_g.push_back(g);
    const auto c = brute_counts({p}, {g});
    const auto r = f1_seqeval({p}, {g});
    CHECK(r.precision == safe_ratio(c.tp, c.pred));
    CHECK(r.recall == safe_ratio(c.tp, c.gold));
    CHECK(r.f1 == f1_score(safe_ratio(c.tp, c.pred), safe_ratio(c.tp, c.gold)));
  }
  const auto c = brute_counts(all_p, all_g);
  const auto r = f1_seqeval(all_p, all_g);
  CHECK(r.precision == safe_ratio(c.tp, c.pred));
  CHECK(r.recall == safe_ratio(c.tp, c.gold));
  CHECK(r.f1 == f1_score(r.precision, r.recall));
}

TEST_CASE("metrics are permutation-equivariant and bounded") {
  Rng rng(3);
  std::vector<Tags> p, g;
  Tags sp, sg;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(6);
    p.push_back(random_tags(rng, n));
    g.push_back(random_tags(rng, n));
    sp.push_back(rng.below(2) ? kPositive : kNegative);
    sg.push_back(rng.below(2) ? kPositive : kNegative);
  }
  const auto ner = f1_seqeval(p, g);
  const auto sa = f1_binary(sp, sg, kPositive);
  std::vector<std::size_t> order(p.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int trial = 0; trial < 5; ++trial) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<Tags> p2, g2;
    Tags sp2, sg2;
    for (auto i : order) {
      p2.push_back(p[i]);
      g2.push_back(g[i]);
      sp2.push_back(sp[i]);
      sg2.push_back(sg[i]);
    }
    CHECK(f1_seqeval(p2, g2) == ner);
    CHECK(f1_binary(sp2, sg2, kPositive) == sa);
  }
  for (const auto* r : {&ner, &sa}) {
    for (double v : {r->precision, r->recall, r->f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(r->f1 <= std::max(r->precision, r->recall) + 1e-12);
  }
}

TEST_CASE("dataset loaders") {
  const auto sa = load_sa_dataset(kFixtures / "sa10.jsonl");
  CHECK(sa.train.size() == 8);
  CHECK(sa.val.size() == 1);
  CHECK(sa.test.size() == 1);
  const auto toy = load_sa_dataset(kFixtures / "toy" / "sa.jsonl");
  CHECK(toy.train.size() == 800);
  CHECK(toy.val.size() == 100);
  CHECK(toy.test.size() == 100);

  write_text(temp_path("block.conll"), "-DOCSTART-\tO\n\nAna\tB-PER\nMaria\tI-PER\nin\tO\nRoma\tB-LOC\n\n");
  const auto block = read_conll_file(temp_path("block.conll"));
  REQUIRE(block.size() == 1);
  CHECK(block[0].tokens.size() == 4);
  CHECK(block[0].tags == Tags{"B-PER", "I-PER", "O", "B-LOC"});

  write_text(temp_path("bad.conll"), "Ana\tB-PER\nx\tB-???\n");
  try {
    read_conll_file(temp_path("bad.conll"));
    FAIL("expected Format");
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalError::Kind::Format);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  write_text(temp_path("bad.jsonl"), "{\"text\": \"a\", \"label\": \"positive\"}\n{\"text\": \"b\", \"label\": \"meh\"}\n");
  try {
    read_sa_file(temp_path("bad.jsonl"));
    FAIL("expected Format");
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalError::Kind::Format);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  const auto ner = load_ner_dataset(kFixtures / "ner");
  CHECK(ner.train.size() == 120);
  CHECK(ner.val.size() == 20);
  CHECK(ner.test.size() == 20);
  const auto space = ner_tag_space(ner);
  CHECK(space.front() == "O");
  CHECK(std::is_sorted(space.begin() + 1, space.end()));

  write_sa_file(sa.train, temp_path("rt.jsonl"));
  CHECK(read_sa_file(temp_path("rt.jsonl")) == sa.train);
  write_conll_file(ner.val, temp_path("rt.conll"));
  CHECK(read_conll_file(temp_path("rt.conll")) == ner.val);
  CHECK(is_valid_tag("B-MISC_2"));
  CHECK_FALSE(is_valid_tag("B-???"));
}

TEST_CASE("report json and aggregation") {
  EvalReport a;
  a.task = "sa";
  a.precision = 0.5;
  a.recall = 1.0;
  a.f1 = f1_score(0.5, 1.0);
  a.macro_f1 = 0.6;
  a.n_examples = 10;
  a.seed = 1;
  const auto j = to_json(a);
  CHECK(j["report_version"] == kReportVersion);
  CHECK(report_from_json(nlohmann::json::parse(j.dump())) == a);
  EvalReport b = a, c = a;
  b.f1 = 0.9;
  c.f1 = 0.3;
  const auto agg = aggregate_reports({a, b, c});
  CHECK(agg.f1 == doctest::Approx((a.f1 + 0.9 + 0.3) / 3.0).epsilon(1e-12));
  CHECK(agg.seed_f1 == std::vector<double>{a.f1, 0.9, 0.3});
  write_report(agg, temp_path("agg.json"));
  CHECK(read_report(temp_path("agg.json")) == agg);
}

TEST_CASE("evaluation is pure and checks the label space") {
  const auto data = experiment::load_toy_data(kFixtures);
  model::EncoderConfig enc;
  enc.d_model = 32;
  enc.n_heads = 4;
  enc.d_ff = 64;
  enc.vocab_size = data.vocab.size();
  enc.max_seq_len = 24;
  ModelBundle bundle;
  bundle.base = model::init_base<float>(enc, 1);
  bundle.task_adapter = model::init_adapter<float>(enc, 4, 2);
  bundle.head = model::init_head<float>(model::HeadKind::SeqCls, {kNegative, kPositive}, enc.d_model, 3);
  bundle.vocab = data.vocab;
  const auto dir = temp_path("bundle");
  save_bundle(dir, bundle);
  const auto loaded = load_bundle(dir);
  const auto r1 = evaluate_model(loaded, kFixtures / "toy" / "sa.jsonl", "val");
  const auto r2 = evaluate_model(loaded, kFixtures / "toy" / "sa.jsonl", "val");
  CHECK(r1 == r2);
  CHECK(r1.n_examples == 100);
  auto direct = evaluate_sa(bundle.view(), data.sa.val, data.vocab);
  direct.seed = r1.seed;
  direct.config = r1.config;
  CHECK(r1 == direct);
  CHECK_THROWS_AS(evaluate_model(loaded, kFixtures / "ner", "val"), EvalError);
}
