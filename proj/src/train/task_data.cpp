// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/train/task_data.hpp"

#include <algorithm>

#include "kgadapt/error.hpp"
#include "kgadapt/text/masking.hpp"
#include "kgadapt/text/tokenizer.hpp"

namespace kgadapt::train {

namespace {

std::int32_t label_id(const std::vector<std::string>& space, const std::string& label) {
  auto it = std::find(space.begin(), space.end(), label);
  if (it == space.end()) {
    throw TrainError(TrainError::Kind::LabelSpace, "label '" + label + "' is not in the label space");
  }
  return static_cast<std::int32_t>(it - space.begin());
}

}  // namespace

std::vector<EncodedExample> encode_sa(const std::vector<eval::SaExample>& examples, const text::Vocab& vocab,
                                      std::size_t max_seq_len) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    const auto ts = text::truncate(text::tokenize(e.text, vocab), max_seq_len);
    EncodedExample x;
    x.ids = ts.token_ids;
    x.labels = {label_id(sa_label_space(), e.label)};
    out.push_back(std::move(x));
  }
  return out;
}

TaskDataset encode_sa(const eval::Splits<eval::SaExample>& splits, const text::Vocab& vocab,
                      std::size_t max_seq_len) {
  TaskDataset d;
  d.task = Task::SA;
  d.label_names = sa_label_space();
  d.train = encode_sa(splits.train, vocab, max_seq_len);
  d.val = encode_sa(splits.val, vocab, max_seq_len);
  d.test = encode_sa(splits.test, vocab, max_seq_len);
  return d;
}

std::vector<EncodedExample> encode_ner(const std::vector<eval::NerExample>& examples, const text::Vocab& vocab,
                                       std::size_t max_seq_len, const std::vector<std::string>& tag_space) {
  if (max_seq_len < 3) throw std::invalid_argument("encode_ner: max_seq_len must leave room for one word");
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    if (e.tokens.size() != e.tags.size()) {
      throw EvalError(EvalError::Kind::Alignment, "NER example with " + std::to_string(e.tokens.size()) +
                                                      " tokens and " + std::to_string(e.tags.size()) + " tags");
    }
    EncodedExample x;
    x.ids.push_back(text::kCls);
    x.labels.push_back(text::kIgnore);
    for (std::size_t w = 0; w < e.tokens.size(); ++w) {
      const auto pieces = text::tokenize_word(e.tokens[w], vocab);
      const std::int32_t tag = label_id(tag_space, e.tags[w]);
      if (pieces.empty()) continue;
      if (x.ids.size() + pieces.size() + 1 > max_seq_len) break;
      x.word_starts.push_back(x.ids.size());
      for (std::size_t p = 0; p < pieces.size(); ++p) {
        x.ids.push_back(pieces[p]);
        x.labels.push_back(p == 0 ? tag : text::kIgnore);
      }
    }
    x.ids.push_back(text::kSep);
    x.labels.push_back(text::kIgnore);
    out.push_back(std::move(x));
  }
  return out;
}

TaskDataset encode_ner(const eval::Splits<eval::NerExample>& splits, const text::Vocab& vocab,
                       std::size_t max_seq_len, std::vector<std::string> tag_space) {
  TaskDataset d;
  d.task = Task::NER;
  d.label_names = tag_space.empty() ? eval::ner_tag_space(splits) : std::move(tag_space);
  d.train = encode_ner(splits.train, vocab, max_seq_len, d.label_names);
  d.val = encode_ner(splits.val, vocab, max_seq_len, d.label_names);
  d.test = encode_ner(splits.test, vocab, max_seq_len, d.label_names);
  return d;
}

}  // namespace kgadapt::train
