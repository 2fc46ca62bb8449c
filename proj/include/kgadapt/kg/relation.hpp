// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace kgadapt::kg {

/// The ConceptNet relations that get verbalized. Every other relation is
/// dropped during ingestion.
enum class Relation {
  Antonym,
  DerivedFrom,
  EtymologicallyDerivedFrom,
  EtymologicallyRelatedTo,
  FormOf,
  HasContext,
  IsA,
  RelatedTo,
  SimilarTo,
  Synonym,
  SymbolOf,
  DistinctFrom,
};

inline constexpr std::size_t kRelationCount = 12;

inline constexpr std::array<Relation, kRelationCount> kAllRelations = {
    Relation::Antonym,    Relation::DerivedFrom, Relation::EtymologicallyDerivedFrom,
    Relation::EtymologicallyRelatedTo, Relation::FormOf, Relation::HasContext,
    Relation::IsA,        Relation::RelatedTo,   Relation::SimilarTo,
    Relation::Synonym,    Relation::SymbolOf,    Relation::DistinctFrom,
};

/// ConceptNet name without the "/r/" prefix, e.g. "RelatedTo".
std::string_view relation_name(Relation r);

/// Accepts "RelatedTo" or "/r/RelatedTo".
std::optional<Relation> relation_from_name(std::string_view name);

/// Relation to English predicate. Predicates stay in English whatever the
/// concept language.
class RelationMapping {
 public:
  /// The fixed 12-row mapping used for ConceptNet language adapters.
  static const RelationMapping& standard();

  std::string_view predicate(Relation r) const { return predicates_[static_cast<std::size_t>(r)]; }

 private:
  explicit RelationMapping(std::array<std::string_view, kRelationCount> predicates)
      : predicates_(predicates) {}

  std::array<std::string_view, kRelationCount> predicates_;
};

}  // namespace kgadapt::kg
