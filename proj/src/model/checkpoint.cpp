// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <type_traits>

#include "kgadapt/error.hpp"

namespace kgadapt::model {

namespace fs = std::filesystem;
using ad::Tensor;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

[[noreturn]] void format_error(const fs::path& path, const std::string& what) {
  throw ModelError(ModelError::Kind::FormatError, path.string() + ": " + what);
}

template <typename Real>
constexpr const char* dtype_name() {
  return std::is_same_v<Real, float> ? "f32" : "f64";
}

struct RawFile {
  nlohmann::json manifest;
  std::string payload;
};

RawFile read_raw(const fs::path& path, bool with_payload) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestError::Kind::Io, "cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0) format_error(path, "bad magic");
  std::uint64_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&len), 8)) format_error(path, "truncated header");
  std::error_code ec;
  const auto file_size = fs::file_size(path, ec);
  if (ec || len > file_size) format_error(path, "manifest length exceeds file size");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) format_error(path, "truncated manifest");
  RawFile raw;
  try {
    raw.manifest = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    format_error(path, std::string("manifest is not JSON: ") + e.what());
  }
  if (with_payload) {
    raw.payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return raw;
}

template <typename Real>
std::map<std::string, Tensor<Real>> by_name(Checkpoint<Real>&& ck) {
  std::map<std::string, Tensor<Real>> m;
  for (auto& [n, t] : ck.tensors) m.emplace(n, std::move(t));
  return m;
}

// Copies loaded values into the freshly initialized layout, so every
// expected tensor must be present with the expected shape.
template <typename Real>
void fill(const fs::path& path, std::map<std::string, Tensor<Real>>& loaded, const NamedTensors<Real>& target) {
  for (const auto& [name, t] : target) {
    auto it = loaded.find(name);
    if (it == loaded.end()) format_error(path, "missing tensor '" + name + "'");
    if (it->second.shape() != t.shape()) {
      format_error(path, "tensor '" + name + "' has shape " + ad::shape_str(it->second.shape()) + ", expected " +
                             ad::shape_str(t.shape()));
    }
    auto dst = t;
    std::copy(it->second.data().begin(), it->second.data().end(), dst.mutable_data().begin());
    loaded.erase(it);
  }
  if (!loaded.empty()) format_error(path, "unexpected tensor '" + loaded.begin()->first + "'");
}

std::string config_pair(const nlohmann::json& found, const nlohmann::json& expected) {
  return "checkpoint config " + found.dump() + " vs expected " + expected.dump();
}

}  // namespace

std::string component_kind_name(ComponentKind k) {
  switch (k) {
    case ComponentKind::Base: return "base";
    case ComponentKind::Adapter: return "adapter";
    case ComponentKind::Fusion: return "fusion";
    case ComponentKind::Head: return "head";
  }
  return "?";
}

template <typename Real>
void save_checkpoint(const fs::path& path, ComponentKind kind, const nlohmann::json& config,
                     const NamedTensors<Real>& tensors) {
  nlohmann::ordered_json manifest;
  manifest["kind"] = component_kind_name(kind);
  manifest["config"] = config;
  manifest["tensors"] = nlohmann::ordered_json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    const std::uint64_t nbytes = t.size() * sizeof(Real);
    nlohmann::ordered_json e;
    e["name"] = name;
    e["shape"] = t.shape();
    e["dtype"] = dtype_name<Real>();
    e["offset"] = offset;
    e["nbytes"] = nbytes;
    manifest["tensors"].push_back(std::move(e));
    offset += nbytes;
  }
  const std::string text = manifest.dump();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError(IngestError::Kind::Io, "cannot write checkpoint " + path.string());
  out.write(kCheckpointMagic, 8);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), 8);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [_, t] : tensors) {
    out.write(reinterpret_cast<const char*>(t.data().data()), static_cast<std::streamsize>(t.size() * sizeof(Real)));
  }
  if (!out) throw IngestError(IngestError::Kind::Io, "short write to " + path.string());
}

template <typename Real>
Checkpoint<Real> load_checkpoint(const fs::path& path) {
  RawFile raw = read_raw(path, true);
  const auto& m = raw.manifest;
  Checkpoint<Real> ck;
  try {
    const std::string kind = m.at("kind").get<std::string>();
    if (kind == "base") ck.kind = ComponentKind::Base;
    else if (kind == "adapter") ck.kind = ComponentKind::Adapter;
    else if (kind == "fusion") ck.kind = ComponentKind::Fusion;
    else if (kind == "head") ck.kind = ComponentKind::Head;
    else format_error(path, "unknown component kind '" + kind + "'");
    ck.config = m.at("config");
    std::uint64_t expected_offset = 0;
    for (const auto& e : m.at("tensors")) {
      const std::string name = e.at("name").get<std::string>();
      const ad::Shape shape = e.at("shape").get<ad::Shape>();
      const std::string dtype = e.at("dtype").get<std::string>();
      const std::uint64_t offset = e.at("offset").get<std::uint64_t>();
      const std::uint64_t nbytes = e.at("nbytes").get<std::uint64_t>();
      std::size_t width = 0;
      if (dtype == "f32") width = 4;
      else if (dtype == "f64") width = 8;
      else format_error(path, "tensor '" + name + "' has unsupported dtype '" + dtype + "'");
      if (ad::numel(shape) * width != nbytes) {
        format_error(path, "tensor '" + name + "' shape " + ad::shape_str(shape) + " does not match " +
                               std::to_string(nbytes) + " payload bytes");
      }
      if (offset != expected_offset || offset + nbytes > raw.payload.size()) {
        format_error(path, "tensor '" + name + "' payload range is out of bounds");
      }
      expected_offset += nbytes;
      std::vector<Real> values(ad::numel(shape));
      const char* src = raw.payload.data() + offset;
      if (width == sizeof(Real)) {
        std::memcpy(values.data(), src, nbytes);
      } else if (width == 4) {
        for (std::size_t i = 0; i < values.size(); ++i) {
          float f;
          std::memcpy(&f, src + 4 * i, 4);
          values[i] = static_cast<Real>(f);
        }
      } else {
        for (std::size_t i = 0; i < values.size(); ++i) {
          double d;
          std::memcpy(&d, src + 8 * i, 8);
          values[i] = static_cast<Real>(d);
        }
      }
      ck.tensors.emplace_back(name, Tensor<Real>::from(shape, std::move(values)));
    }
    if (expected_offset != raw.payload.size()) {
      format_error(path, "payload has " + std::to_string(raw.payload.size() - expected_offset) + " trailing bytes");
    }
  } catch (const nlohmann::json::exception& e) {
    format_error(path, std::string("malformed manifest: ") + e.what());
  }
  return ck;
}

nlohmann::json read_checkpoint_manifest(const fs::path& path) { return read_raw(path, false).manifest; }

template <typename Real>
void save_base(const fs::path& path, const BaseWeights<Real>& w) {
  save_checkpoint<Real>(path, ComponentKind::Base, to_json(w.config), w.named());
}

template <typename Real>
BaseWeights<Real> load_base(const fs::path& path) {
  auto ck = load_checkpoint<Real>(path);
  if (ck.kind != ComponentKind::Base) format_error(path, "not a base checkpoint");
  const EncoderConfig cfg = encoder_config_from_json(ck.config);
  BaseWeights<Real> w = init_base<Real>(cfg, 0);
  auto loaded = by_name(std::move(ck));
  fill(path, loaded, w.named());
  return w;
}

template <typename Real>
void save_adapter(const fs::path& path, const AdapterWeights<Real>& w, const EncoderConfig& config,
                  const nlohmann::json& metadata) {
  nlohmann::ordered_json c;
  c["encoder"] = to_json(config);
  c["reduction_factor"] = w.reduction_factor;
  c["metadata"] = metadata;
  save_checkpoint<Real>(path, ComponentKind::Adapter, c, w.named());
}

template <typename Real>
AdapterWeights<Real> load_adapter(const fs::path& path, const EncoderConfig& expected,
                                  std::optional<std::size_t> expected_reduction) {
  auto ck = load_checkpoint<Real>(path);
  if (ck.kind != ComponentKind::Adapter) format_error(path, "not an adapter checkpoint");
  EncoderConfig found;
  std::size_t r = 0;
  try {
    found = encoder_config_from_json(ck.config.at("encoder"));
    r = ck.config.at("reduction_factor").template get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    format_error(path, std::string("adapter config: ") + e.what());
  }
  nlohmann::json want = {{"d_model", expected.d_model}, {"n_layers", expected.n_layers}};
  nlohmann::json got = {{"d_model", found.d_model}, {"n_layers", found.n_layers}};
  if (expected_reduction) {
    want["reduction_factor"] = *expected_reduction;
    got["reduction_factor"] = r;
  }
  if (want != got) {
    throw ModelError(ModelError::Kind::ConfigMismatch, path.string() + ": " + config_pair(got, want));
  }
  AdapterWeights<Real> w = init_adapter<Real>(expected, r, 0);
  auto loaded = by_name(std::move(ck));
  fill(path, loaded, w.named());
  return w;
}

template <typename Real>
void save_fusion(const fs::path& path, const FusionWeights<Real>& w, const EncoderConfig& config) {
  nlohmann::ordered_json c;
  c["encoder"] = to_json(config);
  save_checkpoint<Real>(path, ComponentKind::Fusion, c, w.named());
}

template <typename Real>
FusionWeights<Real> load_fusion(const fs::path& path, const EncoderConfig& expected) {
  auto ck = load_checkpoint<Real>(path);
  if (ck.kind != ComponentKind::Fusion) format_error(path, "not a fusion checkpoint");
  EncoderConfig found;
  try {
    found = encoder_config_from_json(ck.config.at("encoder"));
  } catch (const nlohmann::json::exception& e) {
    format_error(path, std::string("fusion config: ") + e.what());
  }
  if (found.d_model != expected.d_model || found.n_layers != expected.n_layers) {
    throw ModelError(ModelError::Kind::ConfigMismatch,
                     path.string() + ": " + config_pair(to_json(found), to_json(expected)));
  }
  FusionWeights<Real> w = init_fusion<Real>(expected, 0);
  auto loaded = by_name(std::move(ck));
  fill(path, loaded, w.named());
  return w;
}

template <typename Real>
void save_head(const fs::path& path, const HeadWeights<Real>& w) {
  nlohmann::ordered_json c;
  c["head"] = head_kind_name(w.kind);
  c["n_out"] = w.n_out;
  c["d_model"] = w.weight.dim(1);
  c["labels"] = w.labels;
  save_checkpoint<Real>(path, ComponentKind::Head, c, w.named());
}

template <typename Real>
HeadWeights<Real> load_head(const fs::path& path, std::size_t expected_d_model) {
  auto ck = load_checkpoint<Real>(path);
  if (ck.kind != ComponentKind::Head) format_error(path, "not a head checkpoint");
  HeadWeights<Real> h;
  std::size_t d = 0;
  try {
    h.kind = head_kind_from_name(ck.config.at("head").template get<std::string>());
    h.n_out = ck.config.at("n_out").template get<std::size_t>();
    h.labels = ck.config.at("labels").template get<std::vector<std::string>>();
    d = ck.config.at("d_model").template get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    format_error(path, std::string("head config: ") + e.what());
  }
  if (d != expected_d_model) {
    throw ModelError(ModelError::Kind::ConfigMismatch,
                     path.string() + ": " + config_pair({{"d_model", d}}, {{"d_model", expected_d_model}}));
  }
  h.weight = Tensor<Real>::zeros({h.n_out, d});
  h.bias = Tensor<Real>::zeros({1, h.n_out});
  auto loaded = by_name(std::move(ck));
  fill(path, loaded, h.named());
  return h;
}

#define KGADAPT_INSTANTIATE(R)                                                                                  \
  template void save_checkpoint<R>(const fs::path&, ComponentKind, const nlohmann::json&, const NamedTensors<R>&); \
  template Checkpoint<R> load_checkpoint<R>(const fs::path&);                                                   \
  template void save_base<R>(const fs::path&, const BaseWeights<R>&);                                           \
  template BaseWeights<R> load_base<R>(const fs::path&);                                                        \
  template void save_adapter<R>(const fs::path&, const AdapterWeights<R>&, const EncoderConfig&,               \
                                const nlohmann::json&);                                                         \
  template AdapterWeights<R> load_adapter<R>(const fs::path&, const EncoderConfig&, std::optional<std::size_t>); \
  template void save_fusion<R>(const fs::path&, const FusionWeights<R>&, const EncoderConfig&);                 \
  template FusionWeights<R> load_fusion<R>(const fs::path&, const EncoderConfig&);                              \
  template void save_head<R>(const fs::path&, const HeadWeights<R>&);                                           \
  template HeadWeights<R> load_head<R>(const fs::path&, std::size_t);

KGADAPT_INSTANTIATE(float)
KGADAPT_INSTANTIATE(double)

}  // namespace kgadapt::model
