// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace kgadapt::eval {

inline constexpr int kReportVersion = 1;

struct ClassScore {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count

  bool operator==(const ClassScore&) const = default;
};

struct EvalReport {
  std::string task;  // "sa" or "ner"
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> macro_f1;  // SA only
  std::vector<ClassScore> per_class;
  std::size_t n_examples = 0;
  std::optional<std::uint64_t> seed;
  std::string config;  // free-form configuration label, e.g. "task_on_lang"
  std::vector<double> seed_f1;  // set by aggregate_reports

  bool operator==(const EvalReport&) const = default;
};

nlohmann::ordered_json to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

/// 2 p r / (p + r), 0 when p + r = 0.
double f1_score(double precision, double recall);
/// num / den, 0 when den = 0.
double safe_ratio(std::size_t num, std::size_t den);

/// Positive-class precision/recall/F1, plus per-class scores and their macro
/// average. Throws EvalError::Alignment on length mismatch or empty input.
EvalReport f1_binary(const std::vector<std::string>& preds, const std::vector<std::string>& golds,
                     const std::string& positive_class);

struct Entity {
  std::string type;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  auto operator<=>(const Entity&) const = default;
};

/// Maximal B-X I-X* runs. A dangling I-X (after O or another type) opens a
/// new entity. Throws EvalError::TagAlphabet for anything but O/B-X/I-X.
std::vector<Entity> extract_entities(const std::vector<std::string>& tags);

/// Micro-averaged exact span matching over all sentences, with a per-type
/// table. Throws EvalError::Alignment naming the first misaligned sentence.
EvalReport f1_seqeval(const std::vector<std::vector<std::string>>& pred_tags,
                      const std::vector<std::vector<std::string>>& gold_tags);

/// Arithmetic mean of precision, recall, F1 (and macro F1) over runs; the
/// per-run F1 values are kept in seed_f1.
EvalReport aggregate_reports(const std::vector<EvalReport>& reports);

}  // namespace kgadapt::eval
