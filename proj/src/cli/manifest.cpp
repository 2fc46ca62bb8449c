// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/cli/manifest.hpp"

#include <algorithm>
#include <fstream>

#include "kgadapt/error.hpp"
#include "kgadapt/hash.hpp"

namespace kgadapt::cli {

namespace fs = std::filesystem;

void RunManifest::add_input(const fs::path& path) {
  if (fs::is_directory(path)) {
    // Directories (fixture page sets) hash file by file in name order.
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) inputs.emplace_back(f.generic_string(), sha256_file(f));
    return;
  }
  inputs.emplace_back(path.generic_string(), sha256_file(path));
}

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["tool_version"] = m.tool_version;
  j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
  j["config"] = m.config;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [p, h] : m.inputs) j["inputs"].push_back({{"path", p}, {"sha256", h}});
  j["outputs"] = m.outputs;
  return j;
}

void write_manifest(const RunManifest& m, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << to_json(m).dump(2) << '\n';
  if (!out) throw IngestError(IngestError::Kind::Io, "cannot write " + path.string());
}

namespace {

nlohmann::json parse_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestError::Kind::Io, "cannot open config " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw TrainError(TrainError::Kind::InvalidConfig, path.string() + ": " + e.what());
  }
}

bool is_manifest(const nlohmann::json& j) { return j.is_object() && j.contains("command") && j.contains("config"); }

}  // namespace

nlohmann::json read_config_file(const fs::path& path) {
  const auto j = parse_config(path);
  if (is_manifest(j)) {
    const auto& c = j["config"];
    return c.contains("train") ? c["train"] : c;
  }
  return j;
}

std::optional<nlohmann::json> read_manifest_section(const fs::path& path, const std::string& key) {
  const auto j = parse_config(path);
  if (!is_manifest(j) || !j["config"].contains(key)) return std::nullopt;
  return j["config"][key];
}

}  // namespace kgadapt::cli
