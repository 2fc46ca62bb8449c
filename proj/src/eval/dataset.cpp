// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/eval/dataset.hpp"

#include <cmath>
#include <cctype>
#include <fstream>
#include <optional>
#include <set>

#include "json.hpp"
#include "kgadapt/error.hpp"
#include "kgadapt/utf8.hpp"

namespace kgadapt::eval {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void format_error(const fs::path& path, std::size_t line, const std::string& what) {
  throw EvalError(EvalError::Kind::Format, path.string() + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestError::Kind::Io, "cannot open " + path.string());
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

template <typename T>
Splits<T> split_in_order(std::vector<T> all) {
  const std::size_t n = all.size();
  const auto n_train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n)));
  const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n))));
  Splits<T> s;
  s.train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(all.begin() + static_cast<std::ptrdiff_t>(n_train),
               all.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(all.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), all.end());
  return s;
}

std::optional<fs::path> find_split_file(const fs::path& dir, const std::string& split,
                                        std::initializer_list<const char*> exts) {
  for (const char* ext : exts) {
    auto p = dir / (split + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

struct SaLine {
  SaExample example;
  std::string split;
};

std::vector<SaLine> read_sa_lines(const fs::path& path) {
  auto in = open(path);
  std::vector<SaLine> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (utf8::trim(line).empty()) continue;
    if (utf8::first_invalid(line)) format_error(path, lineno, "invalid UTF-8");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      format_error(path, lineno, "not a JSON object");
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string() || !j.contains("label") ||
        !j["label"].is_string()) {
      format_error(path, lineno, "expected {\"text\": string, \"label\": string}");
    }
    SaLine s;
    s.example.text = j["text"].get<std::string>();
    s.example.label = j["label"].get<std::string>();
    if (s.example.label != kPositive && s.example.label != kNegative) {
      format_error(path, lineno, "label '" + s.example.label + "' is neither positive nor negative");
    }
    if (j.contains("split")) {
      if (!j["split"].is_string()) format_error(path, lineno, "split must be a string");
      s.split = j["split"].get<std::string>();
      if (s.split != "train" && s.split != "val" && s.split != "test") {
        format_error(path, lineno, "split '" + s.split + "' is not train, val or test");
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

bool is_valid_tag(const std::string& tag) {
  if (tag == "O") return true;
  if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-') return false;
  for (std::size_t i = 2; i < tag.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(tag[i]);
    if (!(std::isalnum(c) || c == '_')) return false;
  }
  return true;
}

std::vector<SaExample> read_sa_file(const fs::path& path) {
  std::vector<SaExample> out;
  for (auto& l : read_sa_lines(path)) out.push_back(std::move(l.example));
  return out;
}

Splits<SaExample> load_sa_dataset(const fs::path& path) {
  if (fs::is_directory(path)) {
    Splits<SaExample> s;
    for (auto [name, dst] : {std::pair{"train", &s.train}, {"val", &s.val}, {"test", &s.test}}) {
      auto file = find_split_file(path, name, {".jsonl"});
      if (!file) throw EvalError(EvalError::Kind::Format, path.string() + ": missing " + name + ".jsonl");
      *dst = read_sa_file(*file);
    }
    return s;
  }
  auto lines = read_sa_lines(path);
  bool any_split = false, all_split = true;
  for (const auto& l : lines) {
    any_split = any_split || !l.split.empty();
    all_split = all_split && !l.split.empty();
  }
  if (any_split && !all_split) {
    throw EvalError(EvalError::Kind::Format, path.string() + ": some lines carry a split field and others do not");
  }
  if (!any_split) {
    std::vector<SaExample> all;
    for (auto& l : lines) all.push_back(std::move(l.example));
    return split_in_order(std::move(all));
  }
  Splits<SaExample> s;
  for (auto& l : lines) {
    auto& dst = l.split == "train" ? s.train : l.split == "val" ? s.val : s.test;
    dst.push_back(std::move(l.example));
  }
  return s;
}

std::vector<NerExample> read_conll_file(const fs::path& path) {
  auto in = open(path);
  std::vector<NerExample> out;
  NerExample cur;
  auto flush = [&] {
    if (!cur.tokens.empty()) out.push_back(std::move(cur));
    cur = {};
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    const std::string t(utf8::trim(line));
    if (t.empty()) {
      flush();
      continue;
    }
    if (t.rfind("-DOCSTART-", 0) == 0) continue;
    if (utf8::first_invalid(line)) format_error(path, lineno, "invalid UTF-8");
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) format_error(path, lineno, "expected token<TAB>tag");
    std::string token = line.substr(0, tab);
    std::string tag(utf8::trim(std::string_view(line).substr(tab + 1)));
    if (!is_valid_tag(tag)) format_error(path, lineno, "unknown tag '" + tag + "'");
    cur.tokens.push_back(std::move(token));
    cur.tags.push_back(std::move(tag));
  }
  flush();
  return out;
}

Splits<NerExample> load_ner_dataset(const fs::path& path) {
  if (fs::is_directory(path)) {
    Splits<NerExample> s;
    for (auto [name, dst] : {std::pair{"train", &s.train}, {"val", &s.val}, {"test", &s.test}}) {
      auto file = find_split_file(path, name, {".conll", ".tsv", ".txt"});
      if (!file) throw EvalError(EvalError::Kind::Format, path.string() + ": missing " + name + " split file");
      *dst = read_conll_file(*file);
    }
    return s;
  }
  return split_in_order(read_conll_file(path));
}

void write_sa_file(const std::vector<SaExample>& examples, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError(IngestError::Kind::Io, "cannot write " + path.string());
  for (const auto& e : examples) {
    nlohmann::ordered_json j;
    j["text"] = e.text;
    j["label"] = e.label;
    out << j.dump() << '\n';
  }
}

void write_conll_file(const std::vector<NerExample>& examples, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError(IngestError::Kind::Io, "cannot write " + path.string());
  for (const auto& e : examples) {
    for (std::size_t i = 0; i < e.tokens.size(); ++i) out << e.tokens[i] << '\t' << e.tags[i] << '\n';
    out << '\n';
  }
}

std::vector<std::string> ner_tag_space(const Splits<NerExample>& splits) {
  std::set<std::string> tags;
  for (const auto* part : {&splits.train, &splits.val, &splits.test}) {
    for (const auto& e : *part) tags.insert(e.tags.begin(), e.tags.end());
  }
  tags.erase("O");
  std::vector<std::string> out{"O"};
  out.insert(out.end(), tags.begin(), tags.end());
  return out;
}

}  // namespace kgadapt::eval
