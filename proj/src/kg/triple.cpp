// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/kg/triple.hpp"

#include "kgadapt/error.hpp"
#include "kgadapt/utf8.hpp"

namespace kgadapt::kg {

using nlohmann::json;

nlohmann::json to_json(const Triple& t) {
  return json{{"subject", t.subject},
              {"relation", std::string(relation_name(t.relation))},
              {"object", t.object},
              {"subject_lang", t.subject_lang},
              {"object_lang", t.object_lang},
              {"weight", t.weight}};
}

Triple triple_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("triple record is not a JSON object");
  const auto str = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw ParseError(std::string("triple record lacks string field '") + key + "'");
    return it->get<std::string>();
  };
  Triple t;
  t.subject = str("subject");
  t.object = str("object");
  const auto rel = relation_from_name(str("relation"));
  if (!rel) throw ParseError("triple record has unknown relation '" + str("relation") + "'");
  t.relation = *rel;
  t.subject_lang = str("subject_lang");
  t.object_lang = str("object_lang");
  if (auto it = j.find("weight"); it != j.end()) {
    if (!it->is_number()) throw ParseError("triple weight is not a number");
    t.weight = it->get<double>();
  }
  if (utf8::trim(t.subject).empty() || utf8::trim(t.object).empty())
    throw ParseError("triple record has an empty subject or object");
  return t;
}

std::string_view skip_reason_name(SkipReason r) {
  switch (r) {
    case SkipReason::UnknownRelation: return "unknown_relation";
    case SkipReason::EmptyLabel: return "empty_label";
    case SkipReason::MissingLanguage: return "missing_language";
  }
  return "unknown";
}

namespace {

const json& require_object(const json& raw, const char* key) {
  auto it = raw.find(key);
  if (it == raw.end() || !it->is_object()) throw ParseError(std::string("edge lacks object field '") + key + "'");
  return *it;
}

std::string node_label(const json& node) {
  auto it = node.find("label");
  if (it == node.end() || it->is_null()) return {};
  if (!it->is_string()) throw ParseError("edge node label is not a string");
  return std::string(utf8::trim(it->get_ref<const std::string&>()));
}

// Language from the node's "language" field, else from "/c/<lang>/..." ids.
std::string node_language(const json& node) {
  if (auto it = node.find("language"); it != node.end() && it->is_string() && !it->get_ref<const std::string&>().empty())
    return it->get<std::string>();
  for (const char* key : {"@id", "term"}) {
    auto it = node.find(key);
    if (it == node.end() || !it->is_string()) continue;
    std::string_view id = it->get_ref<const std::string&>();
    if (!id.starts_with("/c/")) continue;
    id.remove_prefix(3);
    const auto slash = id.find('/');
    const auto lang = id.substr(0, slash);
    if (!lang.empty()) return std::string(lang);
  }
  return {};
}

}  // namespace

ParsedEdge parse_edge(const nlohmann::json& raw, std::optional<std::string_view> target_language) {
  if (!raw.is_object()) throw ParseError("edge record is not a JSON object");
  const json& rel = require_object(raw, "rel");
  const json& start = require_object(raw, "start");
  const json& end = require_object(raw, "end");
  auto rel_id = rel.find("@id");
  if (rel_id == rel.end() || !rel_id->is_string()) throw ParseError("edge relation lacks a string '@id'");

  const auto relation = relation_from_name(rel_id->get_ref<const std::string&>());
  if (!relation) return Skip{SkipReason::UnknownRelation};

  Triple t;
  t.relation = *relation;
  t.subject = node_label(start);
  t.object = node_label(end);
  if (t.subject.empty() || t.object.empty()) return Skip{SkipReason::EmptyLabel};

  t.subject_lang = node_language(start);
  t.object_lang = node_language(end);
  if (t.subject_lang.empty() || t.object_lang.empty()) return Skip{SkipReason::MissingLanguage};
  if (target_language && t.subject_lang != *target_language && t.object_lang != *target_language)
    return Skip{SkipReason::MissingLanguage};

  if (auto w = raw.find("weight"); w != raw.end() && !w->is_null()) {
    if (!w->is_number()) throw ParseError("edge weight is not a number");
    t.weight = w->get<double>();
    if (t.weight < 0.0) throw ParseError("edge weight is negative");
  }
  return t;
}

AnnotatedSentence verbalize(const Triple& triple, const RelationMapping& mapping) {
  const std::string_view predicate = mapping.predicate(triple.relation);
  AnnotatedSentence s;
  s.text.reserve(triple.subject.size() + predicate.size() + triple.object.size() + 2);
  s.text.append(triple.subject).append(" ").append(predicate).append(" ").append(triple.object);

  const std::size_t subject_len = utf8::length(triple.subject);
  const std::size_t predicate_len = utf8::length(predicate);
  const std::size_t object_len = utf8::length(triple.object);
  s.subject_span = {0, subject_len};
  s.predicate_span = {subject_len + 1, subject_len + 1 + predicate_len};
  s.object_span = {s.predicate_span.end + 1, s.predicate_span.end + 1 + object_len};
  s.source = triple;
  return s;
}

std::string slice_code_points(std::string_view text, Span span) {
  const auto cps = utf8::decode(text);
  if (span.start > span.end || span.end > cps.size()) return {};
  return utf8::encode(std::u32string_view(cps).substr(span.start, span.size()));
}

}  // namespace kgadapt::kg
