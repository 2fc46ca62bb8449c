// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "kgadapt/model/weights.hpp"

namespace kgadapt::model {

enum class ComponentKind { Base, Adapter, Fusion, Head };

std::string component_kind_name(ComponentKind k);

/// Container layout: the 8-byte magic "KGADAPT1", a little-endian u64 length
/// of the JSON manifest, the manifest, then the concatenated little-endian
/// tensor payloads at the manifest's byte offsets.
inline constexpr char kCheckpointMagic[8] = {'K', 'G', 'A', 'D', 'A', 'P', 'T', '1'};

template <typename Real>
struct Checkpoint {
  ComponentKind kind = ComponentKind::Base;
  nlohmann::json config;
  NamedTensors<Real> tensors;
};

/// Writes f32 payloads for float tensors and f64 for double ones.
template <typename Real>
void save_checkpoint(const std::filesystem::path& path, ComponentKind kind, const nlohmann::json& config,
                     const NamedTensors<Real>& tensors);

/// Throws ModelError::FormatError for a corrupt container.
template <typename Real>
Checkpoint<Real> load_checkpoint(const std::filesystem::path& path);

template <typename Real>
void save_base(const std::filesystem::path& path, const BaseWeights<Real>& w);
template <typename Real>
BaseWeights<Real> load_base(const std::filesystem::path& path);

/// `metadata` is stored verbatim next to the config (e.g. objective, corpus).
template <typename Real>
void save_adapter(const std::filesystem::path& path, const AdapterWeights<Real>& w, const EncoderConfig& config,
                  const nlohmann::json& metadata = nlohmann::json::object());
/// Throws ModelError::ConfigMismatch (printing both configs) when the
/// adapter was trained for another encoder shape or reduction factor.
template <typename Real>
AdapterWeights<Real> load_adapter(const std::filesystem::path& path, const EncoderConfig& expected,
                                  std::optional<std::size_t> expected_reduction = std::nullopt);

template <typename Real>
void save_fusion(const std::filesystem::path& path, const FusionWeights<Real>& w, const EncoderConfig& config);
template <typename Real>
FusionWeights<Real> load_fusion(const std::filesystem::path& path, const EncoderConfig& expected);

template <typename Real>
void save_head(const std::filesystem::path& path, const HeadWeights<Real>& w);
template <typename Real>
HeadWeights<Real> load_head(const std::filesystem::path& path, std::size_t expected_d_model);

/// Reads only the manifest.
nlohmann::json read_checkpoint_manifest(const std::filesystem::path& path);

}  // namespace kgadapt::model
