// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kgadapt/kg/triple.hpp"

namespace kgadapt::kg {

/// One line of a corpus JSONL file. Plain-text sentences carry no spans.
struct CorpusRecord {
  std::string text;
  std::optional<std::array<Span, 3>> spans;  // subject, predicate, object
  std::string lang;

  bool has_spans() const { return spans.has_value(); }
};

struct CorpusStats {
  std::size_t sentence_count = 0;
  std::size_t duplicates_dropped = 0;
  std::array<std::size_t, kRelationCount> per_relation{};

  std::size_t histogram_total() const;
};

struct CorpusOptions {
  std::string lang;
  bool dedup = false;
};

CorpusRecord to_record(const AnnotatedSentence& sentence, std::string lang);

/// Writes one JSONL line per triple, in input order. Throws IngestError::Io.
CorpusStats build_corpus(const std::vector<Triple>& triples, const RelationMapping& mapping,
                         const std::filesystem::path& out, const CorpusOptions& options);

/// The language present in every triple (alphabetically first on ties);
/// empty when the triples share none.
std::string infer_target_language(const std::vector<Triple>& triples);

/// Nonempty trimmed lines in order. Throws IngestError::Encoding with the
/// byte offset of the first invalid UTF-8 sequence.
std::vector<std::string> load_text_corpus(const std::filesystem::path& path);

/// Reads a corpus JSONL file, or a plain-text file when the extension is not
/// ".jsonl" (records then have no spans and the given language).
std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path, const std::string& plain_lang = "");

void write_corpus(const std::vector<CorpusRecord>& records, const std::filesystem::path& out);

std::vector<Triple> load_triples(const std::filesystem::path& path);
void write_triples(const std::vector<Triple>& triples, const std::filesystem::path& out);

/// Recovers the three spans of a verbalized record as an AnnotatedSentence.
AnnotatedSentence to_annotated(const CorpusRecord& record);

}  // namespace kgadapt::kg
