// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/eval/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "kgadapt/error.hpp"
#include "kgadapt/eval/dataset.hpp"

namespace kgadapt::eval {

double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

namespace {

ClassScore score(std::string label, std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassScore c;
  c.label = std::move(label);
  c.precision = safe_ratio(tp, tp + fp);
  c.recall = safe_ratio(tp, tp + fn);
  c.f1 = f1_score(c.precision, c.recall);
  c.support = tp + fn;
  return c;
}

}  // namespace

EvalReport f1_binary(const std::vector<std::string>& preds, const std::vector<std::string>& golds,
                     const std::string& positive_class) {
  if (preds.size() != golds.size()) {
    throw EvalError(EvalError::Kind::Alignment, "f1_binary: " + std::to_string(preds.size()) + " predictions vs " +
                                                    std::to_string(golds.size()) + " gold labels");
  }
  if (golds.empty()) throw EvalError(EvalError::Kind::Alignment, "f1_binary: no examples");
  std::set<std::string> labels(golds.begin(), golds.end());
  labels.insert(preds.begin(), preds.end());
  labels.insert(positive_class);

  EvalReport r;
  r.task = "sa";
  r.n_examples = golds.size();
  double macro = 0.0;
  for (const auto& label : labels) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      const bool p = preds[i] == label, g = golds[i] == label;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
    ClassScore c = score(label, tp, fp, fn);
    macro += c.f1;
    if (label == positive_class) {
      r.precision = c.precision;
      r.recall = c.recall;
      r.f1 = c.f1;
    }
    r.per_class.push_back(std::move(c));
  }
  r.macro_f1 = macro / static_cast<double>(labels.size());
  return r;
}

std::vector<Entity> extract_entities(const std::vector<std::string>& tags) {
  std::vector<Entity> out;
  bool open = false;
  Entity cur;
  auto close = [&](std::size_t end) {
    if (open) {
      cur.end = end;
      out.push_back(cur);
      open = false;
    }
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& t = tags[i];
    if (!is_valid_tag(t)) {
      throw EvalError(EvalError::Kind::TagAlphabet, "unknown tag '" + t + "' at position " + std::to_string(i));
    }
    if (t == "O") {
      close(i);
      continue;
    }
    const std::string type = t.substr(2);
    if (t[0] == 'I' && open && cur.type == type) continue;
    close(i);
    cur = Entity{type, i, i};
    open = true;
  }
  close(tags.size());
  return out;
}

EvalReport f1_seqeval(const std::vector<std::vector<std::string>>& pred_tags,
                      const std::vector<std::vector<std::string>>& gold_tags) {
  if (pred_tags.size() != gold_tags.size()) {
    throw EvalError(EvalError::Kind::Alignment, "f1_seqeval: " + std::to_string(pred_tags.size()) +
                                                    " predicted sentences vs " + std::to_string(gold_tags.size()) +
                                                    " gold sentences");
  }
  struct Counts {
    std::size_t tp = 0, n_pred = 0, n_gold = 0;
  };
  std::map<std::string, Counts> by_type;
  Counts total;
  for (std::size_t s = 0; s < gold_tags.size(); ++s) {
    if (pred_tags[s].size() != gold_tags[s].size()) {
      throw EvalError(EvalError::Kind::Alignment, "f1_seqeval: sentence " + std::to_string(s) + " has " +
                                                      std::to_string(pred_tags[s].size()) + " predicted vs " +
                                                      std::to_string(gold_tags[s].size()) + " gold tags");
    }
    const auto pred = extract_entities(pred_tags[s]);
    const auto gold = extract_entities(gold_tags[s]);
    for (const auto& e : pred) ++by_type[e.type].n_pred;
    for (const auto& e : gold) ++by_type[e.type].n_gold;
    // Both lists are sorted by start position and spans do not overlap, so
    // a merge finds the exact matches.
    std::vector<Entity> a(pred), b(gold), common;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    for (const auto& e : common) ++by_type[e.type].tp;
    total.tp += common.size();
    total.n_pred += pred.size();
    total.n_gold += gold.size();
  }
  EvalReport r;
  r.task = "ner";
  r.n_examples = gold_tags.size();
  r.precision = safe_ratio(total.tp, total.n_pred);
  r.recall = safe_ratio(total.tp, total.n_gold);
  r.f1 = f1_score(r.precision, r.recall);
  for (const auto& [type, c] : by_type) {
    r.per_class.push_back(score(type, c.tp, c.n_pred - c.tp, c.n_gold - c.tp));
  }
  return r;
}

EvalReport aggregate_reports(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate_reports: no reports");
  EvalReport r;
  r.task = reports.front().task;
  r.config = reports.front().config;
  r.n_examples = reports.front().n_examples;
  const double n = static_cast<double>(reports.size());
  bool all_macro = true;
  double macro = 0.0;
  for (const auto& x : reports) {
    if (x.task != r.task) {
      throw EvalError(EvalError::Kind::ConfigMismatch, "cannot aggregate " + x.task + " with " + r.task + " reports");
    }
    r.precision += x.precision / n;
    r.recall += x.recall / n;
    r.f1 += x.f1 / n;
    r.seed_f1.push_back(x.f1);
    if (x.macro_f1) macro += *x.macro_f1 / n;
    else all_macro = false;
  }
  if (all_macro) r.macro_f1 = macro;
  return r;
}

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["report_version"] = kReportVersion;
  j["task"] = r.task;
  if (!r.config.empty()) j["config"] = r.config;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  if (r.macro_f1) j["macro_f1"] = *r.macro_f1;
  j["n_examples"] = r.n_examples;
  j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json(nullptr);
  if (!r.seed_f1.empty()) j["seed_f1"] = r.seed_f1;
  j["per_class"] = nlohmann::ordered_json::array();
  for (const auto& c : r.per_class) {
    j["per_class"].push_back(
        {{"label", c.label}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}});
  }
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("report_version").get<int>() != kReportVersion) {
      throw EvalError(EvalError::Kind::Format, "unsupported report_version " + j.at("report_version").dump());
    }
    EvalReport r;
    r.task = j.at("task").get<std::string>();
    r.config = j.value("config", "");
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    if (j.contains("macro_f1")) r.macro_f1 = j["macro_f1"].get<double>();
    r.n_examples = j.at("n_examples").get<std::size_t>();
    if (j.contains("seed") && !j["seed"].is_null()) r.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("seed_f1")) r.seed_f1 = j["seed_f1"].get<std::vector<double>>();
    for (const auto& c : j.value("per_class", nlohmann::json::array())) {
      r.per_class.push_back({c.at("label").get<std::string>(), c.at("precision").get<double>(),
                             c.at("recall").get<double>(), c.at("f1").get<double>(),
                             c.at("support").get<std::size_t>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw EvalError(EvalError::Kind::Format, std::string("malformed report: ") + e.what());
  }
}

}  // namespace kgadapt::eval
