// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "kgadapt/error.hpp"
#include "kgadapt/kg/conceptnet_client.hpp"
#include "kgadapt/kg/corpus.hpp"
#include "kgadapt/kg/relation.hpp"
#include "kgadapt/kg/triple.hpp"
#include "kgadapt/rng.hpp"

using namespace kgadapt;
using namespace kgadapt::kg;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = KGADAPT_TEST_FIXTURES;

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "kgadapt_kg_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json edge(const std::string& rel, const std::string& s, const std::string& o,
                    const std::string& s_lang = "en", const std::string& o_lang = "en") {
  return {{"rel", {{"@id", "/r/" + rel}}},
          {"start", {{"label", s}, {"language", s_lang}}},
          {"end", {{"label", o}, {"language", o_lang}}},
          {"weight", 1.0}};
}

// Serves canned responses in order; the last one repeats.
struct ScriptedSource : PageSource {
  std::vector<PageResponse> script;
  std::vector<std::string> urls;
  PageResponse get(const std::string& url) override {
    urls.push_back(url);
    const auto i = std::min(urls.size() - 1, script.size() - 1);
    return script[i];
  }
};

FetchOptions quick(const std::string& lang, std::size_t pages = 10) {
  FetchOptions o;
  o.language = lang;
  o.page_limit = pages;
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

}  // namespace

TEST_CASE("relation mapping is total and matches the fixed predicate list") {
  const std::vector<std::pair<Relation, std::string>> expected{
      {Relation::Antonym, "is the opposite of"},
      {Relation::DerivedFrom, "is derived from"},
      {Relation::EtymologicallyDerivedFrom, "is etymologically derived from"},
      {Relation::EtymologicallyRelatedTo, "is etymologically related to"},
      {Relation::FormOf, "is a form of"},
      {Relation::HasContext, "has context of"},
      {Relation::IsA, "is a type of"},
      {Relation::RelatedTo, "is related to"},
      {Relation::SimilarTo, "is similar to"},
      {Relation::Synonym, "is a synonym of"},
      {Relation::SymbolOf, "is a symbol of"},
      {Relation::DistinctFrom, "is distinct from"},
  };
  const auto& m = RelationMapping::standard();
  std::set<std::string> seen;
  for (const auto& [r, pred] : expected) {
    CHECK(m.predicate(r) == pred);
    seen.insert(std::string(m.predicate(r)));
  }
  CHECK(seen.size() == kRelationCount);
  for (auto r : kAllRelations) {
    CHECK(relation_from_name(relation_name(r)) == r);
    CHECK(relation_from_name("/r/" + std::string(relation_name(r))) == r);
  }
  CHECK_FALSE(relation_from_name("ExternalURL").has_value());
}

TEST_CASE("verbalize builds the sentence and code-point spans") {
  const Triple t{"kiel", Relation::RelatedTo, "eat", "mt", "en", 1.0};
  const auto s = verbalize(t);
  CHECK(s.text == "kiel is related to eat");
  CHECK(s.subject_span == Span{0, 4});
  CHECK(s.predicate_span == Span{5, 18});
  CHECK(s.object_span == Span{19, 22});
  CHECK(verbalize({"hot", Relation::Antonym, "cold", "en", "en", 1}).text == "hot is the opposite of cold");
  CHECK(verbalize({"x", Relation::Synonym, "x", "en", "en", 1}).text == "x is a synonym of x");
  // Multi-word and non-ASCII labels stay verbatim.
  const auto m = verbalize({"ice cream", Relation::IsA, "ħobż", "en", "mt", 1});
  CHECK(slice_code_points(m.text, m.subject_span) == "ice cream");
  CHECK(slice_code_points(m.text, m.object_span) == "ħobż");
}

TEST_CASE("round trip of spans over random triples") {
  Rng rng(5);
  const std::vector<std::string> pieces{"a", "ħ", "ż", "kiel", "ice cream", "日本", "x-y"};
  for (int i = 0; i < 500; ++i) {
    Triple t;
    t.subject = pieces[rng.below(pieces.size())] + pieces[rng.below(pieces.size())];
    t.object = pieces[rng.below(pieces.size())];
    t.relation = kAllRelations[rng.below(kRelationCount)];
    t.subject_lang = "mt";
    t.object_lang = "en";
    const auto s = verbalize(t);
    CHECK(slice_code_points(s.text, s.subject_span) == t.subject);
    CHECK(slice_code_points(s.text, s.predicate_span) == RelationMapping::standard().predicate(t.relation));
    CHECK(slice_code_points(s.text, s.object_span) == t.object);
    CHECK(s.subject_span.end + 1 == s.predicate_span.start);
    CHECK(s.predicate_span.end + 1 == s.object_span.start);
  }
}

TEST_CASE("parse_edge keeps in-scope relations and reports skips") {
  const auto ok = parse_edge(edge("Antonym", "hot", "cold"));
  REQUIRE(std::holds_alternative<Triple>(ok));
  CHECK(std::get<Triple>(ok) == Triple{"hot", Relation::Antonym, "cold", "en", "en", 1.0});
  const auto url = parse_edge(edge("ExternalURL", "a", "b"));
  REQUIRE(std::holds_alternative<Skip>(url));
  CHECK(std::get<Skip>(url).reason == SkipReason::UnknownRelation);
  const auto empty = parse_edge(edge("IsA", "a", "  "));
  REQUIRE(std::holds_alternative<Skip>(empty));
  CHECK(std::get<Skip>(empty).reason == SkipReason::EmptyLabel);
  auto no_lang = edge("IsA", "a", "b");
  no_lang["end"].erase("language");
  REQUIRE(std::holds_alternative<Skip>(parse_edge(no_lang)));
  CHECK(std::get<Skip>(parse_edge(no_lang)).reason == SkipReason::MissingLanguage);
  // Neither side in the requested language.
  REQUIRE(std::holds_alternative<Skip>(parse_edge(edge("IsA", "a", "b"), "mt")));
  CHECK_THROWS_AS(parse_edge(nlohmann::json::array()), ParseError);
  CHECK_THROWS_AS(parse_edge(nlohmann::json{{"rel", 3}}), ParseError);
}

TEST_CASE("fixture fetch follows pages and honours the page limit") {
  FixturePageSource two(kFixtures / "conceptnet" / "mt");
  CHECK(fetch_edges(quick("mt"), two).size() == 40);
  FixturePageSource one(kFixtures / "conceptnet" / "mt");
  CHECK(fetch_edges(quick("mt", 1), one).size() == 20);
  FixturePageSource empty(kFixtures / "conceptnet" / "xx");
  CHECK(fetch_edges(quick("xx"), empty).empty());

  FixturePageSource again(kFixtures / "conceptnet" / "mt");
  ExtractStats stats;
  const auto triples = extract_triples(quick("mt"), again, &stats);
  CHECK(stats.raw_records == 40);
  CHECK(stats.pages == 2);
  CHECK(stats.skipped_unknown_relation == 1);
  CHECK(stats.skipped_empty_label == 1);
  CHECK(triples.size() == 38);
  for (const auto& t : triples) CHECK((t.subject_lang == "mt" || t.object_lang == "mt"));
}

TEST_CASE("relation filter drops other relations") {
  FixturePageSource src(kFixtures / "conceptnet" / "mt");
  auto opt = quick("mt");
  opt.relation_filter = {Relation::Antonym, Relation::IsA};
  for (const auto& t : extract_triples(opt, src)) {
    CHECK((t.relation == Relation::Antonym || t.relation == Relation::IsA));
  }
}

TEST_CASE("transient failures back off, then succeed or surface Transport") {
  const std::string page = nlohmann::json{{"edges", {edge("IsA", "a", "b", "mt")}}}.dump();
  ScriptedSource flaky;
  flaky.script = {{429, "", ""}, {0, "", "connection reset"}, {200, page, ""}};
  std::vector<long> waits;
  auto opt = quick("mt");
  opt.sleep = [&](std::chrono::milliseconds d) { waits.push_back(static_cast<long>(d.count())); };
  CHECK(fetch_edges(opt, flaky).size() == 1);
  CHECK(waits == std::vector<long>{500, 1000});

  ScriptedSource down;
  down.script = {{503, "", ""}};
  waits.clear();
  try {
    fetch_edges(opt, down);
    FAIL("expected Transport");
  } catch (const IngestError& e) {
    CHECK(e.kind() == IngestError::Kind::Transport);
  }
  CHECK(waits.size() == 4);
  CHECK(waits.back() <= 8000);

  ScriptedSource broken;
  broken.script = {{200, "{not json", ""}};
  try {
    fetch_edges(opt, broken);
    FAIL("expected Parse");
  } catch (const IngestError& e) {
    CHECK(e.kind() == IngestError::Kind::Parse);
    CHECK(std::string(e.what()).find("/query") != std::string::npos);
  }
}

TEST_CASE("build_corpus writes one line per triple and is deterministic") {
  const auto triples = load_triples(kFixtures / "mt.jsonl");
  REQUIRE(triples.size() == 40);
  const auto a = build_corpus(triples, RelationMapping::standard(), temp_path("a.jsonl"), {"mt", false});
  const auto b = build_corpus(triples, RelationMapping::standard(), temp_path("b.jsonl"), {"mt", false});
  CHECK(a.sentence_count == 40);
  CHECK(a.histogram_total() == 40);
  CHECK(read_file(temp_path("a.jsonl")) == read_file(temp_path("b.jsonl")));
  const auto records = load_corpus(temp_path("a.jsonl"));
  REQUIRE(records.size() == 40);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto s = to_annotated(records[i]);
    CHECK(slice_code_points(s.text, s.subject_span) == triples[i].subject);
    CHECK(slice_code_points(s.text, s.object_span) == triples[i].object);
  }
  std::vector<Triple> three(triples.begin(), triples.begin() + 3);
  CHECK(build_corpus(three, RelationMapping::standard(), temp_path("three.jsonl"), {"mt", false}).sentence_count == 3);
  CHECK(build_corpus({}, RelationMapping::standard(), temp_path("none.jsonl"), {"mt", false}).sentence_count == 0);
  CHECK(read_file(temp_path("none.jsonl")).empty());
  auto dup = three;
  dup.push_back(three[0]);
  const auto d = build_corpus(dup, RelationMapping::standard(), temp_path("dup.jsonl"), {"mt", true});
  CHECK(d.sentence_count == 3);
  CHECK(d.duplicates_dropped == 1);
  CHECK(infer_target_language(triples) == "mt");
}

TEST_CASE("plain text corpora") {
  {
    std::ofstream out(temp_path("ab.txt"), std::ios::binary);
    out << "a\n\n  b \n";
  }
  CHECK(load_text_corpus(temp_path("ab.txt")) == std::vector<std::string>{"a", "b"});
  { std::ofstream out(temp_path("empty.txt"), std::ios::binary); }
  CHECK(load_text_corpus(temp_path("empty.txt")).empty());
  CHECK(load_text_corpus(kFixtures / "lines100.txt").size() == 100);
  {
    std::ofstream out(temp_path("bad.txt"), std::ios::binary);
    out << "ok\n\xff\xfe\n";
  }
  try {
    load_text_corpus(temp_path("bad.txt"));
    FAIL("expected Encoding");
  } catch (const IngestError& e) {
    CHECK(e.kind() == IngestError::Kind::Encoding);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  const auto plain = load_corpus(kFixtures / "plain.jsonl");
  CHECK(plain.size() == 20);
  for (const auto& r : plain) CHECK_FALSE(r.has_spans());
}
