// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace kgadapt::cli {

/// Provenance written by every artifact-producing command before its first
/// output. Paths are stored as given on the command line.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config;  // fully resolved, defaults expanded
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::optional<std::uint64_t> seed;
  std::string tool_version;
  std::vector<std::string> outputs;

  /// Hashes `path` and records it as an input.
  void add_input(const std::filesystem::path& path);
};

nlohmann::ordered_json to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::filesystem::path& path);

/// Accepts either a bare config object or a manifest, whose "config" member
/// is then returned.
nlohmann::json read_config_file(const std::filesystem::path& path);

/// The named member of a manifest's "config", or nothing for a bare config.
std::optional<nlohmann::json> read_manifest_section(const std::filesystem::path& path, const std::string& key);

}  // namespace kgadapt::cli
