// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kgadapt/eval/dataset.hpp"
#include "kgadapt/text/vocab.hpp"
#include "kgadapt/train/config.hpp"

namespace kgadapt::train {

/// Token ids with CLS/SEP and per-position targets. SA examples carry a single
/// label (for the CLS position); NER examples label the first piece of each
/// word and ignore the rest.
struct EncodedExample {
  std::vector<text::TokenId> ids;
  std::vector<std::int32_t> labels;
  std::vector<std::size_t> word_starts;  // NER: token index of each word's first piece
};

struct TaskDataset {
  Task task = Task::SA;
  std::vector<std::string> label_names;
  std::vector<EncodedExample> train, val, test;
};

/// Label ids follow `label_names` ("negative", "positive" for SA). Sentences
/// are truncated at whole words to `max_seq_len`. Throws
/// TrainError::LabelSpace when an example's label is outside the space.
TaskDataset encode_sa(const eval::Splits<eval::SaExample>& splits, const text::Vocab& vocab,
                      std::size_t max_seq_len);
std::vector<EncodedExample> encode_sa(const std::vector<eval::SaExample>& examples, const text::Vocab& vocab,
                                      std::size_t max_seq_len);

/// Words dropped by truncation are absent from `word_starts`; metric code
/// pads their predictions with "O".
TaskDataset encode_ner(const eval::Splits<eval::NerExample>& splits, const text::Vocab& vocab,
                       std::size_t max_seq_len, std::vector<std::string> tag_space = {});
std::vector<EncodedExample> encode_ner(const std::vector<eval::NerExample>& examples, const text::Vocab& vocab,
                                       std::size_t max_seq_len, const std::vector<std::string>& tag_space);

inline const std::vector<std::string>& sa_label_space() {
  static const std::vector<std::string> labels{eval::kNegative, eval::kPositive};
  return labels;
}

}  // namespace kgadapt::train
