// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/text/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "kgadapt/error.hpp"
#include "kgadapt/text/tokenizer.hpp"
#include "kgadapt/utf8.hpp"

namespace kgadapt::text {

const std::vector<std::string>& Vocab::special_tokens() {
  static const std::vector<std::string> specials = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
  return specials;
}

Vocab::Vocab(std::vector<std::string> tokens, bool lowercase) : tokens_(std::move(tokens)), lowercase_(lowercase) {
  const auto& specials = special_tokens();
  if (tokens_.size() < 6) throw PipelineError(PipelineError::Kind::Format, "vocabulary needs at least 6 tokens");
  if (!std::equal(specials.begin(), specials.end(), tokens_.begin()))
    throw PipelineError(PipelineError::Kind::Format, "vocabulary must start with [PAD] [UNK] [CLS] [SEP] [MASK]");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw PipelineError(PipelineError::Kind::Format, "vocabulary contains an empty token");
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second)
      throw PipelineError(PipelineError::Kind::Format, "duplicate vocabulary token '" + tokens_[i] + "'");
    if (i >= static_cast<std::size_t>(kFirstRegular)) max_len_ = std::max(max_len_, utf8::length(tokens_[i]));
  }
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocab::id_or_unk(std::string_view token) const { return find(token).value_or(kUnk); }

void Vocab::save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["lowercase"] = lowercase_;
  j["tokens"] = tokens_;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IngestError(IngestError::Kind::Io, "cannot write " + path.string());
  os << j.dump() << '\n';
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestError::Kind::Io, "cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw PipelineError(PipelineError::Kind::Format, path.string() + ": " + e.what());
  }
  // A bare array of tokens is accepted as well as the object form.
  const nlohmann::json* tokens = &j;
  bool lowercase = false;
  if (j.is_object()) {
    if (!j.contains("tokens")) throw PipelineError(PipelineError::Kind::Format, path.string() + ": no 'tokens'");
    tokens = &j["tokens"];
    lowercase = j.value("lowercase", false);
  }
  if (!tokens->is_array()) throw PipelineError(PipelineError::Kind::Format, path.string() + ": tokens must be an array");
  std::vector<std::string> out;
  for (const auto& t : *tokens) {
    if (!t.is_string()) throw PipelineError(PipelineError::Kind::Format, path.string() + ": non-string token");
    out.push_back(t.get<std::string>());
  }
  return Vocab(std::move(out), lowercase);
}

namespace {

std::vector<std::pair<std::string, std::size_t>> ranked(const std::map<std::string, std::size_t>& counts) {
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return v;
}

std::string fold(std::string_view word, bool lowercase) {
  if (!lowercase) return std::string(word);
  auto cps = utf8::decode(word);
  for (auto& c : cps) c = utf8::to_lower(c);
  return utf8::encode(cps);
}

}  // namespace

Vocab train_vocab(const std::vector<std::string>& corpus, const VocabOptions& options) {
  if (options.target_size < 6) throw std::invalid_argument("train_vocab: target_size must be at least 6");
  // std::map gives a byte-lexicographic tie order for equal frequencies.
  std::map<std::string, std::size_t> word_counts;
  std::map<std::string, std::size_t> char_counts;
  std::size_t total_words = 0;
  for (const auto& sentence : corpus) {
    for (const auto& raw : split_words(sentence)) {
      const std::string word = fold(raw, options.lowercase);
      ++word_counts[word];
      ++total_words;
      for (char32_t cp : utf8::decode(word)) {
        std::string c;
        utf8::append(c, cp);
        ++char_counts[c];
      }
    }
  }
  if (total_words == 0) throw PipelineError(PipelineError::Kind::EmptyCorpus, "train_vocab: corpus has no words");

  std::vector<std::string> tokens = Vocab::special_tokens();
  std::set<std::string> present(tokens.begin(), tokens.end());
  const auto push = [&](const std::string& t) {
    if (tokens.size() >= options.target_size) return;
    if (present.insert(t).second) tokens.push_back(t);
  };
  // Characters first so any word can fall back to single code points.
  for (const auto& [c, n] : ranked(char_counts)) push(c);
  for (const auto& [w, n] : ranked(word_counts)) {
    if (n < options.min_word_freq) break;
    if (utf8::length(w) > 1) push(w);
  }
  return Vocab(std::move(tokens), options.lowercase);
}

}  // namespace kgadapt::text
