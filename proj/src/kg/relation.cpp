// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/kg/relation.hpp"

namespace kgadapt::kg {

namespace {

constexpr std::array<std::string_view, kRelationCount> kNames = {
    "Antonym", "DerivedFrom", "EtymologicallyDerivedFrom", "EtymologicallyRelatedTo",
    "FormOf",  "HasContext",  "IsA",                       "RelatedTo",
    "SimilarTo", "Synonym",   "SymbolOf",                  "DistinctFrom",
};

constexpr std::array<std::string_view, kRelationCount> kPredicates = {
    "is the opposite of", "is derived from", "is etymologically derived from",
    "is etymologically related to", "is a form of", "has context of",
    "is a type of", "is related to", "is similar to",
    "is a synonym of", "is a symbol of", "is distinct from",
};

}  // namespace

std::string_view relation_name(Relation r) { return kNames[static_cast<std::size_t>(r)]; }

std::optional<Relation> relation_from_name(std::string_view name) {
  if (name.starts_with("/r/")) name.remove_prefix(3);
  // Some API versions append a trailing slash.
  if (name.ends_with('/')) name.remove_suffix(1);
  for (std::size_t i = 0; i < kRelationCount; ++i) {
    if (kNames[i] == name) return kAllRelations[i];
  }
  return std::nullopt;
}

const RelationMapping& RelationMapping::standard() {
  static const RelationMapping mapping(kPredicates);
  return mapping;
}

}  // namespace kgadapt::kg
