// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "kgadapt/kg/relation.hpp"

namespace kgadapt::kg {

struct Triple {
  std::string subject;
  Relation relation = Relation::RelatedTo;
  std::string object;
  std::string subject_lang;
  std::string object_lang;
  double weight = 1.0;

  bool operator==(const Triple&) const = default;
};

nlohmann::json to_json(const Triple& t);
/// Throws ParseError on a malformed record.
Triple triple_from_json(const nlohmann::json& j);

enum class SkipReason { UnknownRelation, EmptyLabel, MissingLanguage };

std::string_view skip_reason_name(SkipReason r);

struct Skip {
  SkipReason reason;
};

using ParsedEdge = std::variant<Triple, Skip>;

/// Converts one raw ConceptNet API edge. When `target_language` is given,
/// edges that do not touch it on either side are skipped as
/// MissingLanguage. Throws ParseError when the record is not an edge at all.
ParsedEdge parse_edge(const nlohmann::json& raw, std::optional<std::string_view> target_language = {});

/// Half-open [start, end) in code points.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const Span&) const = default;
};

struct AnnotatedSentence {
  std::string text;
  Span subject_span;
  Span predicate_span;
  Span object_span;
  std::optional<Triple> source;
};

/// "subject predicate object" joined by single spaces.
AnnotatedSentence verbalize(const Triple& triple, const RelationMapping& mapping = RelationMapping::standard());

/// Code point substring of `text`.
std::string slice_code_points(std::string_view text, Span span);

}  // namespace kgadapt::kg
