// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace kgadapt::eval {

inline const std::string kPositive = "positive";
inline const std::string kNegative = "negative";

struct SaExample {
  std::string text;
  std::string label;  // kPositive or kNegative

  bool operator==(const SaExample&) const = default;
};

struct NerExample {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;  // BIO, same length as tokens

  bool operator==(const NerExample&) const = default;
};

template <typename T>
struct Splits {
  std::vector<T> train;
  std::vector<T> val;
  std::vector<T> test;

  std::size_t total() const { return train.size() + val.size() + test.size(); }
};

/// True for "O", "B-X" and "I-X" where X is a nonempty run of ASCII letters,
/// digits or underscores.
bool is_valid_tag(const std::string& tag);

/// JSONL lines {"text", "label", optional "split": "train"|"val"|"test"}.
/// Without split fields the file is cut in order into round(0.8 n) training,
/// round(0.1 n) validation and the rest test. A directory is read as
/// train.jsonl, val.jsonl and test.jsonl. Throws EvalError::Format with the
/// line number.
Splits<SaExample> load_sa_dataset(const std::filesystem::path& path);

/// CoNLL blocks of "token<TAB>tag" lines separated by blank lines;
/// "-DOCSTART-" lines are skipped. A directory is read as train/val/test
/// with a .conll, .tsv or .txt extension; a single file is split like SA.
Splits<NerExample> load_ner_dataset(const std::filesystem::path& path);

std::vector<SaExample> read_sa_file(const std::filesystem::path& path);
std::vector<NerExample> read_conll_file(const std::filesystem::path& path);
void write_sa_file(const std::vector<SaExample>& examples, const std::filesystem::path& path);
void write_conll_file(const std::vector<NerExample>& examples, const std::filesystem::path& path);

/// "O" first, then the remaining tags of every split in byte order.
std::vector<std::string> ner_tag_space(const Splits<NerExample>& splits);

}  // namespace kgadapt::eval
