// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/kg/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "kgadapt/error.hpp"
#include "kgadapt/utf8.hpp"

namespace kgadapt::kg {

using nlohmann::json;
using nlohmann::ordered_json;

std::size_t CorpusStats::histogram_total() const {
  return std::accumulate(per_relation.begin(), per_relation.end(), std::size_t{0});
}

CorpusRecord to_record(const AnnotatedSentence& sentence, std::string lang) {
  return CorpusRecord{sentence.text,
                      std::array<Span, 3>{sentence.subject_span, sentence.predicate_span, sentence.object_span},
                      std::move(lang)};
}

namespace {

ordered_json record_json(const CorpusRecord& r) {
  ordered_json j;
  j["text"] = r.text;
  if (r.spans) {
    const auto& s = *r.spans;
    j["spans"] = ordered_json{{"subject", {s[0].start, s[0].end}},
                              {"predicate", {s[1].start, s[1].end}},
                              {"object", {s[2].start, s[2].end}}};
  } else {
    j["spans"] = nullptr;
  }
  j["lang"] = r.lang;
  return j;
}

std::ofstream open_out(const std::filesystem::path& out) {
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw IngestError(IngestError::Kind::Io, "cannot open " + out.string() + " for writing");
  return os;
}

void check_written(std::ofstream& os, const std::filesystem::path& out) {
  os.flush();
  if (!os) throw IngestError(IngestError::Kind::Io, "write to " + out.string() + " failed");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestError::Kind::Io, "cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Span parse_span(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned())
    throw IngestError(IngestError::Kind::Parse, where + ": span must be [start, end] with nonnegative integers");
  Span s{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
  if (s.start > s.end) throw IngestError(IngestError::Kind::Parse, where + ": span start exceeds end");
  return s;
}

}  // namespace

CorpusStats build_corpus(const std::vector<Triple>& triples, const RelationMapping& mapping,
                         const std::filesystem::path& out, const CorpusOptions& options) {
  auto os = open_out(out);
  CorpusStats stats;
  std::set<std::tuple<std::string, Relation, std::string, std::string, std::string>> seen;
  for (const auto& t : triples) {
    if (options.dedup && !seen.emplace(t.subject, t.relation, t.object, t.subject_lang, t.object_lang).second) {
      ++stats.duplicates_dropped;
      continue;
    }
    const auto rec = to_record(verbalize(t, mapping), options.lang);
    os << record_json(rec).dump() << '\n';
    ++stats.sentence_count;
    ++stats.per_relation[static_cast<std::size_t>(t.relation)];
  }
  check_written(os, out);
  return stats;
}

std::string infer_target_language(const std::vector<Triple>& triples) {
  if (triples.empty()) return {};
  std::set<std::string> common{triples.front().subject_lang, triples.front().object_lang};
  for (const auto& t : triples) {
    std::set<std::string> here{t.subject_lang, t.object_lang};
    std::set<std::string> next;
    std::set_intersection(common.begin(), common.end(), here.begin(), here.end(), std::inserter(next, next.begin()));
    common = std::move(next);
    if (common.empty()) return {};
  }
  return *common.begin();
}

std::vector<std::string> load_text_corpus(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (auto bad = utf8::first_invalid(bytes))
    throw IngestError(IngestError::Kind::Encoding,
                      path.string() + ": invalid UTF-8 at byte offset " + std::to_string(*bad));
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) nl = bytes.size();
    const auto line = utf8::trim(std::string_view(bytes).substr(pos, nl - pos));
    if (!line.empty()) lines.emplace_back(line);
    pos = nl + 1;
  }
  return lines;
}

std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path, const std::string& plain_lang) {
  if (path.extension() != ".jsonl") {
    std::vector<CorpusRecord> out;
    for (auto& line : load_text_corpus(path)) out.push_back({std::move(line), std::nullopt, plain_lang});
    return out;
  }
  const std::string bytes = read_file(path);
  if (auto bad = utf8::first_invalid(bytes))
    throw IngestError(IngestError::Kind::Encoding,
                      path.string() + ": invalid UTF-8 at byte offset " + std::to_string(*bad));
  std::vector<CorpusRecord> out;
  std::istringstream in(bytes);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (utf8::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IngestError(IngestError::Kind::Parse, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string())
      throw IngestError(IngestError::Kind::Parse, where + ": record lacks a string 'text'");
    CorpusRecord rec;
    rec.text = j["text"].get<std::string>();
    if (auto it = j.find("lang"); it != j.end() && it->is_string()) rec.lang = it->get<std::string>();
    else rec.lang = plain_lang;
    if (auto it = j.find("spans"); it != j.end() && !it->is_null()) {
      if (!it->is_object()) throw IngestError(IngestError::Kind::Parse, where + ": 'spans' must be an object or null");
      std::array<Span, 3> spans;
      const char* names[] = {"subject", "predicate", "object"};
      for (int k = 0; k < 3; ++k) {
        if (!it->contains(names[k])) throw IngestError(IngestError::Kind::Parse, where + ": spans lack '" + names[k] + "'");
        spans[k] = parse_span((*it)[names[k]], where);
      }
      const std::size_t len = utf8::length(rec.text);
      if (!(spans[0].end <= spans[1].start && spans[1].end <= spans[2].start && spans[2].end <= len))
        throw IngestError(IngestError::Kind::Parse, where + ": spans are unordered or exceed the text");
      rec.spans = spans;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_corpus(const std::vector<CorpusRecord>& records, const std::filesystem::path& out) {
  auto os = open_out(out);
  for (const auto& r : records) os << record_json(r).dump() << '\n';
  check_written(os, out);
}

std::vector<Triple> load_triples(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::vector<Triple> out;
  std::istringstream in(bytes);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (utf8::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    try {
      out.push_back(triple_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw IngestError(IngestError::Kind::Parse, where + ": " + e.what());
    } catch (const ParseError& e) {
      throw IngestError(IngestError::Kind::Parse, where + ": " + e.what());
    }
  }
  return out;
}

void write_triples(const std::vector<Triple>& triples, const std::filesystem::path& out) {
  auto os = open_out(out);
  for (const auto& t : triples) {
    ordered_json j;
    j["subject"] = t.subject;
    j["relation"] = std::string(relation_name(t.relation));
    j["object"] = t.object;
    j["subject_lang"] = t.subject_lang;
    j["object_lang"] = t.object_lang;
    j["weight"] = t.weight;
    os << j.dump() << '\n';
  }
  check_written(os, out);
}

AnnotatedSentence to_annotated(const CorpusRecord& record) {
  AnnotatedSentence s;
  s.text = record.text;
  if (record.spans) {
    s.subject_span = (*record.spans)[0];
    s.predicate_span = (*record.spans)[1];
    s.object_span = (*record.spans)[2];
  }
  return s;
}

}  // namespace kgadapt::kg
