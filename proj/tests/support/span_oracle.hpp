// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <string>
#include <vector>

#include "kgadapt/eval/metrics.hpp"

namespace kgadapt::testing {

// Enumerates every (type, start, end) candidate and keeps those that read as
// B-X I-X* (or a dangling I-X opening) closed by a tag that cannot continue.
inline std::set<eval::Entity> brute_spans(const std::vector<std::string>& tags) {
  std::set<eval::Entity> out;
  const std::size_t n = tags.size();
  auto type_of = [&](std::size_t i) { return tags[i].substr(2); };
  for (std::size_t s = 0; s < n; ++s) {
    if (tags[s] == "O") continue;
    const auto type = type_of(s);
    const bool opens = tags[s][0] == 'B' || s == 0 || tags[s - 1] == "O" || type_of(s - 1) != type;
    if (!opens) continue;
    for (std::size_t e = s + 1; e <= n; ++e) {
      bool inside = true;
      for (std::size_t k = s + 1; k < e; ++k) inside = inside && tags[k] == "I-" + type;
      const bool closed = e == n || tags[e] != "I-" + type;
      if (inside && closed) out.insert({type, s, e});
    }
  }
  return out;
}

struct SpanCounts {
  std::size_t tp = 0, pred = 0, gold = 0;
};

inline SpanCounts brute_counts(const std::vector<std::vector<std::string>>& preds,
                               const std::vector<std::vector<std::string>>& golds) {
  SpanCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto p = brute_spans(preds[i]);
    const auto g = brute_spans(golds[i]);
    c.pred += p.size();
    c.gold += g.size();
    for (const auto& e : p) c.tp += g.count(e);
  }
  return c;
}

}  // namespace kgadapt::testing
