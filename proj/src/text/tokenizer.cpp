// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/text/tokenizer.hpp"

#include <algorithm>

#include "kgadapt/utf8.hpp"

namespace kgadapt::text {

namespace {

struct WordSlice {
  std::u32string text;
  std::size_t start = 0;  // code point offsets
  std::size_t end = 0;
};

std::vector<WordSlice> word_slices(std::string_view sentence) {
  const auto cps = utf8::decode(sentence);
  std::vector<WordSlice> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && utf8::is_space(cps[i])) ++i;
    const std::size_t b = i;
    while (i < cps.size() && !utf8::is_space(cps[i])) ++i;
    if (i > b) out.push_back({cps.substr(b, i - b), b, i});
  }
  return out;
}

std::vector<TokenId> pieces(std::u32string word, const Vocab& vocab) {
  if (vocab.lowercase())
    for (auto& c : word) c = utf8::to_lower(c);
  std::vector<TokenId> out;
  std::size_t i = 0;
  while (i < word.size()) {
    const std::size_t longest = std::min(vocab.max_token_length(), word.size() - i);
    bool matched = false;
    for (std::size_t len = longest; len >= 1; --len) {
      if (auto id = vocab.find(utf8::encode(std::u32string_view(word).substr(i, len)));
          id && *id >= kFirstRegular) {
        out.push_back(*id);
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) {
      out.push_back(kUnk);
      ++i;
    }
  }
  return out;
}

std::size_t overlap(std::size_t b, std::size_t e, const kg::Span& s) {
  const std::size_t lo = std::max(b, s.start);
  const std::size_t hi = std::min(e, s.end);
  return hi > lo ? hi - lo : 0;
}

TokenizedSentence assemble(const std::vector<WordSlice>& words, const Vocab& vocab,
                           const kg::AnnotatedSentence* spans) {
  TokenizedSentence ts;
  ts.token_ids.push_back(kCls);
  for (const auto& w : words) {
    const auto ids = pieces(w.text, vocab);
    const std::size_t start = ts.token_ids.size();
    ts.token_ids.insert(ts.token_ids.end(), ids.begin(), ids.end());
    ts.word_boundaries.push_back({start, ts.token_ids.size()});
    WordRole role = WordRole::Plain;
    if (spans) {
      const std::size_t o_subj = overlap(w.start, w.end, spans->subject_span);
      const std::size_t o_pred = overlap(w.start, w.end, spans->predicate_span);
      const std::size_t o_obj = overlap(w.start, w.end, spans->object_span);
      const std::size_t best = std::max({o_subj, o_pred, o_obj});
      if (best > 0) role = best == o_pred ? WordRole::Predicate : (best == o_subj ? WordRole::Subject : WordRole::Object);
    }
    ts.word_roles.push_back(role);
  }
  ts.token_ids.push_back(kSep);
  return ts;
}

}  // namespace

bool TokenizedSentence::has_targets() const {
  return std::any_of(word_roles.begin(), word_roles.end(),
                     [](WordRole r) { return r == WordRole::Subject || r == WordRole::Object; });
}

std::vector<TokenId> tokenize_word(std::string_view word, const Vocab& vocab) {
  return pieces(utf8::decode(word), vocab);
}

TokenizedSentence tokenize(std::string_view sentence, const Vocab& vocab) {
  return assemble(word_slices(sentence), vocab, nullptr);
}

TokenizedSentence tokenize(const kg::AnnotatedSentence& sentence, const Vocab& vocab) {
  return assemble(word_slices(sentence.text), vocab, &sentence);
}

TokenizedSentence truncate(const TokenizedSentence& ts, std::size_t max_len) {
  if (ts.token_ids.size() <= max_len) return ts;
  TokenizedSentence out;
  out.token_ids.push_back(kCls);
  for (std::size_t w = 0; w < ts.word_boundaries.size(); ++w) {
    const auto& r = ts.word_boundaries[w];
    if (out.token_ids.size() + r.size() + 1 > max_len) break;
    const std::size_t start = out.token_ids.size();
    out.token_ids.insert(out.token_ids.end(), ts.token_ids.begin() + static_cast<std::ptrdiff_t>(r.start),
                         ts.token_ids.begin() + static_cast<std::ptrdiff_t>(r.end));
    out.word_boundaries.push_back({start, out.token_ids.size()});
    out.word_roles.push_back(ts.word_roles[w]);
  }
  out.token_ids.push_back(kSep);
  return out;
}

std::vector<std::string> split_words(std::string_view sentence) {
  std::vector<std::string> out;
  for (const auto& w : word_slices(sentence)) out.push_back(utf8::encode(w.text));
  return out;
}

}  // namespace kgadapt::text
