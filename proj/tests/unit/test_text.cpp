// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "kgadapt/error.hpp"
#include "kgadapt/kg/corpus.hpp"
#include "kgadapt/kg/triple.hpp"
#include "kgadapt/rng.hpp"
#include "kgadapt/text/masking.hpp"
#include "kgadapt/text/tokenizer.hpp"
#include "kgadapt/text/vocab.hpp"

using namespace kgadapt;
using namespace kgadapt::text;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = KGADAPT_TEST_FIXTURES;

Vocab toy_vocab() {
  return Vocab({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "kiel", "is", "related", "to", "eat", "e", "a", "t", "r",
                "l", "d", "##lat", "##ed", "rel", "o", "h", "w", "n"});
}

// Every label-free position must carry the original token.
void check_untouched(const TokenizedSentence& ts, const MaskedExample& m) {
  REQUIRE(m.input_ids.size() == ts.token_ids.size());
  REQUIRE(m.labels.size() == ts.token_ids.size());
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    if (m.labels[i] == kIgnore) {
      CHECK(m.input_ids[i] == ts.token_ids[i]);
    } else {
      CHECK(m.labels[i] == ts.token_ids[i]);
    }
  }
  CHECK(m.labels.front() == kIgnore);
  CHECK(m.labels.back() == kIgnore);
}

// Labeled positions of each word are all-or-nothing.
void check_whole_words(const TokenizedSentence& ts, const MaskedExample& m) {
  for (const auto& w : ts.word_boundaries) {
    std::size_t labeled = 0;
    for (std::size_t p = w.start; p < w.end; ++p) labeled += m.labels[p] != kIgnore;
    CHECK((labeled == 0 || labeled == w.size()));
  }
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("specials occupy the lowest ids") {
  const auto v = train_vocab({"a b", "a"}, VocabOptions{8, 1, false});
  CHECK(v.token(kPad) == "[PAD]");
  CHECK(v.token(kUnk) == "[UNK]");
  CHECK(v.token(kCls) == "[CLS]");
  CHECK(v.token(kSep) == "[SEP]");
  CHECK(v.token(kMask) == "[MASK]");
  CHECK(v.find("a").has_value());
  CHECK(v.find("b").has_value());
  CHECK(v.size() <= 8);
  CHECK(train_vocab({"a b", "a"}, VocabOptions{8, 1, false}) == v);
  CHECK_THROWS_AS(train_vocab({}, VocabOptions{}), PipelineError);
}

TEST_CASE("vocab json round trip") {
  const auto v = train_vocab(read_lines(kFixtures / "lines100.txt"), VocabOptions{128, 2, false});
  const auto path = fs::temp_directory_path() / "kgadapt_vocab_test.json";
  v.save(path);
  CHECK(Vocab::load(path) == v);
}

TEST_CASE("UNK rate on the 1000-sentence fixture stays under one percent") {
  const auto lines = read_lines(kFixtures / "vocab1000.txt");
  REQUIRE(lines.size() == 1000);
  const auto v = train_vocab(lines, VocabOptions{256, 2, false});
  std::size_t unk = 0, total = 0;
  for (const auto& l : lines) {
    const auto ts = tokenize(l, v);
    for (std::size_t i = 1; i + 1 < ts.token_ids.size(); ++i) {
      ++total;
      unk += ts.token_ids[i] == kUnk;
    }
  }
  CHECK(static_cast<double>(unk) / static_cast<double>(total) < 0.01);
}

TEST_CASE("tokenize assigns word roles from spans") {
  const auto v = toy_vocab();
  const auto s = kg::verbalize({"kiel", kg::Relation::RelatedTo, "eat", "mt", "en", 1});
  const auto ts = tokenize(s, v);
  CHECK(ts.token_ids.front() == kCls);
  CHECK(ts.token_ids.back() == kSep);
  CHECK(ts.word_roles ==
        std::vector<WordRole>{WordRole::Subject, WordRole::Predicate, WordRole::Predicate, WordRole::Predicate,
                              WordRole::Object});
  const auto plain = tokenize("hello world", v);
  CHECK(plain.word_roles == std::vector<WordRole>{WordRole::Plain, WordRole::Plain});
  const auto empty = tokenize("", v);
  CHECK(empty.token_ids == std::vector<TokenId>{kCls, kSep});
  CHECK(empty.word_boundaries.empty());
}

TEST_CASE("word boundaries partition the regular positions") {
  const auto v = train_vocab(read_lines(kFixtures / "vocab1000.txt"), VocabOptions{64, 50, false});
  for (const auto& line : read_lines(kFixtures / "lines100.txt")) {
    const auto ts = tokenize(line, v);
    std::size_t next = 1;
    for (const auto& w : ts.word_boundaries) {
      CHECK(w.start == next);
      CHECK(w.end > w.start);
      next = w.end;
    }
    CHECK(next == ts.token_ids.size() - 1);
  }
}

TEST_CASE("truncation keeps whole words and the end marker") {
  const auto v = toy_vocab();
  const auto ts = tokenize("kiel is related to eat", v);
  const auto t = truncate(ts, 4);
  CHECK(t.token_ids.size() <= 4);
  CHECK(t.token_ids.back() == kSep);
  CHECK(t.word_boundaries.size() == t.word_roles.size());
}

TEST_CASE("masking config validation") {
  MaskingConfig c;
  CHECK_NOTHROW(c.validate());
  c.replace_mask = 0.7;
  CHECK_THROWS_AS(c.validate(), PipelineError);
  c = MaskingConfig{};
  c.p_mlm = 0.0;
  CHECK_THROWS_AS(c.validate(), PipelineError);
}

TEST_CASE("MLM label rate over a ten-thousand-token stream") {
  const auto lines = read_lines(kFixtures / "vocab1000.txt");
  const auto v = train_vocab(lines, VocabOptions{256, 2, false});
  std::string stream;
  for (int rep = 0; rep < 2; ++rep) {
    for (const auto& l : lines) stream += l + " ";
  }
  const auto ts = tokenize(stream, v);
  REQUIRE(ts.regular_token_count() >= 10000);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto m = mask_mlm(ts, {}, v.size(), seed);
    check_untouched(ts, m);
    const double rate = static_cast<double>(m.label_count()) / static_cast<double>(ts.regular_token_count());
    CHECK(rate >= 0.13);
    CHECK(rate <= 0.17);
  }
}

TEST_CASE("MLM details: forced selection, determinism and the replacement split") {
  const auto v = toy_vocab();
  const auto one = tokenize("eat", v);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto m = mask_mlm(one, {}, v.size(), s);
    CHECK(m.label_count() == 1);
    CHECK(m.labels[1] == one.token_ids[1]);
  }
  const auto ts = tokenize("kiel is related to eat", v);
  CHECK(mask_mlm(ts, {}, v.size(), 9) == mask_mlm(ts, {}, v.size(), 9));
  std::size_t as_mask = 0, kept = 0, random = 0;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const auto m = mask_mlm(one, {}, v.size(), s);
    if (m.input_ids[1] == kMask) ++as_mask;
    else if (m.input_ids[1] == one.token_ids[1]) ++kept;
    else ++random;
  }
  // A random replacement can land on the original token, so "kept" is slightly above 10%.
  CHECK(as_mask / 20000.0 == doctest::Approx(0.8).epsilon(0.03));
  CHECK(random / 20000.0 == doctest::Approx(0.1 * (1.0 - 1.0 / (v.size() - kFirstRegular))).epsilon(0.1));
  CHECK(kept / 20000.0 > 0.09);
}

TEST_CASE("FLM masks whole words at the word rate") {
  const auto v = toy_vocab();
  // "relatedlated" is not in the vocabulary: rel ##lat ##ed ##lat ##ed.
  auto ts = tokenize("relateded", v);
  REQUIRE(ts.word_boundaries.size() == 1);
  REQUIRE(ts.word_boundaries[0].size() >= 3);
  const auto m = mask_flm(ts, {}, v.size(), 3);
  const auto& w = ts.word_boundaries[0];
  for (std::size_t p = w.start; p < w.end; ++p) CHECK(m.labels[p] == ts.token_ids[p]);

  const auto lines = read_lines(kFixtures / "vocab1000.txt");
  const auto big = train_vocab(lines, VocabOptions{64, 50, false});
  std::string stream;
  for (int rep = 0; rep < 2; ++rep) {
    for (const auto& l : lines) stream += l + " ";
  }
  const auto t = tokenize(stream, big);
  REQUIRE(t.word_boundaries.size() >= 10000);
  REQUIRE(t.regular_token_count() > t.word_boundaries.size());
  for (std::uint64_t seed : {100, 101, 102}) {
    const auto fm = mask_flm(t, {}, big.size(), seed);
    check_untouched(t, fm);
    check_whole_words(t, fm);
    std::size_t masked = 0;
    for (const auto& wr : t.word_boundaries) masked += fm.labels[wr.start] != kIgnore;
    const double rate = static_cast<double>(masked) / static_cast<double>(t.word_boundaries.size());
    CHECK(rate >= 0.13);
    CHECK(rate <= 0.17);
  }
  // Short sentences keep whole-word labels too.
  std::uint64_t seed = 500;
  for (const auto& l : lines) {
    const auto s = tokenize(l, big);
    check_whole_words(s, mask_flm(s, {}, big.size(), seed++));
  }
}

TEST_CASE("FLM pieces of one word share one replacement action") {
  const auto v = toy_vocab();
  const auto ts = tokenize("relateded", v);
  const auto& w = ts.word_boundaries[0];
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto m = mask_flm(ts, {}, v.size(), s);
    const bool first_mask = m.input_ids[w.start] == kMask;
    for (std::size_t p = w.start; p < w.end; ++p) CHECK((m.input_ids[p] == kMask) == first_mask);
  }
}

TEST_CASE("TLM only labels subject and object words") {
  const auto v = toy_vocab();
  const auto s = kg::verbalize({"kiel", kg::Relation::RelatedTo, "eat", "mt", "en", 1});
  const auto ts = tokenize(s, v);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto m = mask_tlm(ts, {}, v.size(), seed);
    check_untouched(ts, m);
    for (std::size_t wi = 0; wi < ts.word_boundaries.size(); ++wi) {
      if (ts.word_roles[wi] == WordRole::Predicate) {
        CHECK(m.labels[ts.word_boundaries[wi].start] == kIgnore);
      }
    }
    CHECK(m.label_count() >= 1);
  }
  CHECK_THROWS_AS(mask_tlm(tokenize("kiel eat", v), {}, v.size(), 1), PipelineError);
}

TEST_CASE("TLM over generated sentences: no predicate labels, all patterns occur") {
  const auto triples = kg::load_triples(kFixtures / "mt.jsonl");
  std::vector<std::string> texts;
  for (const auto& t : triples) texts.push_back(kg::verbalize(t).text);
  const auto v = train_vocab(texts, VocabOptions{256, 1, false});
  std::size_t violations = 0, subject_only = 0, object_only = 0, both = 0;
  for (std::size_t i = 0; i < 2000; ++i) {
    const auto s = kg::verbalize(triples[i % triples.size()]);
    const auto ts = tokenize(s, v);
    const auto m = mask_tlm(ts, {}, v.size(), 1000 + i);
    check_whole_words(ts, m);
    bool subj = false, obj = false;
    for (std::size_t wi = 0; wi < ts.word_boundaries.size(); ++wi) {
      const bool labeled = m.labels[ts.word_boundaries[wi].start] != kIgnore;
      if (!labeled) continue;
      if (ts.word_roles[wi] == WordRole::Predicate || ts.word_roles[wi] == WordRole::Plain) ++violations;
      subj = subj || ts.word_roles[wi] == WordRole::Subject;
      obj = obj || ts.word_roles[wi] == WordRole::Object;
    }
    subject_only += subj && !obj;
    object_only += obj && !subj;
    both += subj && obj;
  }
  CHECK(violations == 0);
  CHECK(subject_only > 0);
  CHECK(object_only > 0);
  CHECK(both > 0);
}

TEST_CASE("maskers are pure and serialize") {
  const auto v = toy_vocab();
  const auto ts = tokenize(kg::verbalize({"kiel", kg::Relation::RelatedTo, "eat", "mt", "en", 1}), v);
  for (auto o : {Objective::MLM, Objective::FLM, Objective::TLM}) {
    CHECK(mask(o, ts, {}, v.size(), 77) == mask(o, ts, {}, v.size(), 77));
    CHECK(objective_from_name(objective_name(o)) == o);
    const auto j = to_json(mask(o, ts, {}, v.size(), 77));
    CHECK(j["seed"] == 77);
    CHECK(j["objective"] == std::string(objective_name(o)));
  }
}
