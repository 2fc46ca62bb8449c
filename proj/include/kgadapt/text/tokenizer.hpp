// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kgadapt/kg/triple.hpp"
#include "kgadapt/text/vocab.hpp"

namespace kgadapt::text {

enum class WordRole { Subject, Predicate, Object, Plain };

/// Token index range [start, end) of one whitespace-delimited word.
struct WordRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const WordRange&) const = default;
};

struct TokenizedSentence {
  std::vector<TokenId> token_ids;  // CLS ... SEP
  std::vector<WordRange> word_boundaries;
  std::vector<WordRole> word_roles;

  bool has_targets() const;
  std::size_t regular_token_count() const { return token_ids.size() >= 2 ? token_ids.size() - 2 : 0; }
};

/// Greedy longest-match pieces of one word; unmatched code points are UNK.
std::vector<TokenId> tokenize_word(std::string_view word, const Vocab& vocab);

TokenizedSentence tokenize(std::string_view sentence, const Vocab& vocab);

/// Words entirely inside a span take that span's role; a word straddling
/// spans takes the role with the larger overlap.
TokenizedSentence tokenize(const kg::AnnotatedSentence& sentence, const Vocab& vocab);

/// Keeps the leading whole words that fit in `max_len` positions including
/// CLS and SEP.
TokenizedSentence truncate(const TokenizedSentence& ts, std::size_t max_len);

/// Whitespace split of a line into words (code point aware).
std::vector<std::string> split_words(std::string_view sentence);

}  // namespace kgadapt::text
