// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgadapt::text {

using TokenId = std::int32_t;

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kCls = 2;
inline constexpr TokenId kSep = 3;
inline constexpr TokenId kMask = 4;
inline constexpr TokenId kFirstRegular = 5;

struct VocabOptions {
  std::size_t target_size = 512;
  /// Whole words need at least this many occurrences to get their own id.
  std::size_t min_word_freq = 2;
  bool lowercase = false;
};

/// Token inventory: five special tokens, then single code points, then whole
/// words, each group ranked by corpus frequency.
class Vocab {
 public:
  /// Builds from tokens in id order; the first five must be the specials.
  explicit Vocab(std::vector<std::string> tokens, bool lowercase = false);

  std::size_t size() const { return tokens_.size(); }
  bool lowercase() const { return lowercase_; }

  std::optional<TokenId> find(std::string_view token) const;
  TokenId id_or_unk(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// Length in code points of the longest regular token.
  std::size_t max_token_length() const { return max_len_; }

  bool operator==(const Vocab& other) const {
    return tokens_ == other.tokens_ && lowercase_ == other.lowercase_;
  }

  /// {"lowercase": bool, "tokens": [...]} in id order.
  void save(const std::filesystem::path& path) const;
  static Vocab load(const std::filesystem::path& path);

  static const std::vector<std::string>& special_tokens();

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  bool lowercase_ = false;
  std::size_t max_len_ = 1;
};

/// Throws PipelineError::EmptyCorpus when no sentence has a word, and
/// std::invalid_argument when target_size < 6.
Vocab train_vocab(const std::vector<std::string>& corpus, const VocabOptions& options);

}  // namespace kgadapt::text
