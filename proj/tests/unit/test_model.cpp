// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "kgadapt/autodiff/gradcheck.hpp"
#include "kgadapt/autodiff/ops.hpp"
#include "kgadapt/error.hpp"
#include "kgadapt/model/checkpoint.hpp"
#include "kgadapt/model/encoder.hpp"
#include "kgadapt/model/weights.hpp"
#include "kgadapt/rng.hpp"

using namespace kgadapt;
using namespace kgadapt::model;
using T = ad::Tensor<double>;
namespace fs = std::filesystem;

namespace {

EncoderConfig small_config() {
  EncoderConfig c;
  c.n_layers = 2;
  c.d_model = 16;
  c.n_heads = 2;
  c.d_ff = 32;
  c.vocab_size = 30;
  c.max_seq_len = 12;
  c.dropout_p = 0.0;
  return c;
}

// Nonzero up/value projections so the composition has gradient everywhere.
template <typename X>
void perturb(X& w, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& [name, t] : w.named()) {
    auto tt = t;
    for (auto& v : tt.mutable_data()) v += rng.uniform(-0.2, 0.2);
  }
}

std::vector<std::int32_t> random_ids(std::size_t n, std::size_t vocab, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::int32_t> ids(n);
  for (auto& i : ids) i = static_cast<std::int32_t>(rng.below(vocab));
  return ids;
}

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "kgadapt_model_test";
  fs::create_directories(dir);
  return dir / name;
}

double max_abs_diff(const T& a, const T& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace

TEST_CASE("config validation") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  c.n_heads = 3;
  CHECK_THROWS_AS(c.validate(), ModelError);
  c = small_config();
  c.vocab_size = 0;
  CHECK_THROWS_AS(c.validate(), ModelError);
  CHECK(encoder_config_from_json(to_json(small_config())) == small_config());
}

TEST_CASE("encoder output shape and eval purity") {
  const auto base = init_base<double>(small_config(), 1);
  const auto ids = random_ids(7, 30, 2);
  const auto h1 = encoder_forward<double>(ids, base, AdapterStack<double>::none());
  const auto h2 = encoder_forward<double>(ids, base, AdapterStack<double>::none());
  CHECK(h1.shape() == ad::Shape{7, 16});
  CHECK(max_abs_diff(h1, h2) == 0.0);
  CHECK_THROWS_AS(encoder_forward<double>(random_ids(13, 30, 3), base, AdapterStack<double>::none()), ModelError);
  CHECK_THROWS_AS(encoder_forward<double>(std::vector<std::int32_t>{}, base, AdapterStack<double>::none()), ShapeError);
  CHECK_THROWS_AS(encoder_forward<double>(std::vector<std::int32_t>{30}, base, AdapterStack<double>::none()), ShapeError);
}

TEST_CASE("safe insertion of zero-initialized adapters and fusion") {
  const auto cfg = small_config();
  const auto base = init_base<double>(cfg, 4);
  const auto la1 = init_adapter<double>(cfg, 4, 5);
  const auto la2 = init_adapter<double>(cfg, 4, 6);
  const auto task = init_adapter<double>(cfg, 2, 7);
  const auto fusion = init_fusion<double>(cfg, 8);
  const auto ids = random_ids(9, 30, 9);
  const auto plain = encoder_forward<double>(ids, base, AdapterStack<double>::none());
  auto single = AdapterStack<double>::with_language(la1);
  single.task = &task;
  CHECK(max_abs_diff(plain, encoder_forward<double>(ids, base, single)) <= 1e-12);
  const auto fused = AdapterStack<double>::with_fusion({&la1, &la2}, fusion, &task);
  CHECK(max_abs_diff(plain, encoder_forward<double>(ids, base, fused)) <= 1e-12);
}

TEST_CASE("fusion attention is a distribution and arity one is rejected") {
  const auto cfg = small_config();
  auto base = init_base<double>(cfg, 10);
  std::vector<AdapterWeights<double>> adapters;
  for (int i = 0; i < 3; ++i) {
    adapters.push_back(init_adapter<double>(cfg, 4, 11 + i));
    perturb(adapters.back(), 20 + i);
  }
  auto fusion = init_fusion<double>(cfg, 30);
  perturb(fusion, 31);
  for (std::size_t k : {2u, 3u}) {
    std::vector<const AdapterWeights<double>*> list;
    for (std::size_t i = 0; i < k; ++i) list.push_back(&adapters[i]);
    FusionTrace<double> trace;
    encoder_forward<double>(random_ids(6, 30, 32), base, AdapterStack<double>::with_fusion(list, fusion), {}, &trace);
    REQUIRE(trace.attention.size() == cfg.n_layers);
    for (const auto& a : trace.attention) {
      CHECK(a.dim(1) == k);
      for (std::size_t p = 0; p < a.dim(0); ++p) {
        double s = 0;
        for (std::size_t j = 0; j < k; ++j) {
          CHECK(a.at(p, j) >= 0.0);
          s += a.at(p, j);
        }
        CHECK(std::abs(s - 1.0) <= 1e-6);
      }
    }
  }
  CHECK_THROWS_AS(AdapterStack<double>::with_fusion({&adapters[0]}, fusion), ModelError);
}

TEST_CASE("gradcheck: full encoder + adapters + fusion + head composition") {
  const auto cfg = small_config();
  auto base = init_base<double>(cfg, 40);
  auto la1 = init_adapter<double>(cfg, 4, 41);
  auto la2 = init_adapter<double>(cfg, 4, 42);
  auto task = init_adapter<double>(cfg, 4, 43);
  auto fusion = init_fusion<double>(cfg, 44);
  auto head = init_head<double>(HeadKind::SeqCls, {"negative", "positive"}, cfg.d_model, 45);
  for (auto* a : {&la1, &la2, &task}) perturb(*a, 46);
  perturb(fusion, 47);
  const auto ids = random_ids(5, 30, 48);
  const std::vector<std::int32_t> label{1};
  const auto stack = AdapterStack<double>::with_fusion({&la1, &la2}, fusion, &task);
  const std::function<T()> loss = [&] {
    return ad::cross_entropy(head_forward(encoder_forward<double>(ids, base, stack), head), label);
  };
  double worst = 0;
  auto check_all = [&](const NamedTensors<double>& named) {
    for (const auto& [name, t] : named) {
      const auto r = ad::finite_diff_check_param<double>(loss, t);
      INFO(name);
      CHECK(r.max_rel_error < 1e-4);
      worst = std::max(worst, r.max_rel_error);
    }
  };
  set_requires_grad<double>(base.named(), true);
  for (auto* x : {&la1, &la2, &task}) set_requires_grad<double>(x->named(), true);
  set_requires_grad<double>(fusion.named(), true);
  set_requires_grad<double>(head.named(), true);
  check_all(base.named());
  check_all(la1.named());
  check_all(task.named());
  check_all(fusion.named());
  check_all(head.named());
  MESSAGE("worst relative error " << worst);
}

TEST_CASE("gradcheck: tied mlm head and token classification head") {
  const auto cfg = small_config();
  auto base = init_base<double>(cfg, 50);
  auto la = init_adapter<double>(cfg, 4, 51);
  perturb(la, 52);
  set_requires_grad<double>(base.named(), true);
  set_requires_grad<double>(la.named(), true);
  const auto mlm = mlm_head(base);
  const auto ids = random_ids(6, 30, 53);
  const std::vector<std::int32_t> labels{-100, 4, -100, -100, 17, -100};
  const auto stack = AdapterStack<double>::with_language(la);
  const std::function<T()> loss = [&] {
    return ad::cross_entropy(head_forward(encoder_forward<double>(ids, base, stack), mlm), labels);
  };
  for (const auto& [name, t] : base.named()) {
    INFO(name);
    CHECK(ad::finite_diff_check_param<double>(loss, t).max_rel_error < 1e-4);
  }
  for (const auto& [name, t] : la.named()) {
    INFO(name);
    CHECK(ad::finite_diff_check_param<double>(loss, t).max_rel_error < 1e-4);
  }
  auto tok = init_head<double>(HeadKind::TokCls, {"O", "B-PER", "I-PER"}, cfg.d_model, 54);
  set_requires_grad<double>(tok.named(), true);
  const std::vector<std::int32_t> tags{-100, 0, 1, 2, 0, -100};
  const std::function<T()> tl = [&] {
    return ad::cross_entropy(head_forward(encoder_forward<double>(ids, base, stack), tok), tags);
  };
  CHECK(ad::finite_diff_check_param<double>(tl, tok.weight).max_rel_error < 1e-4);
}

TEST_CASE("head output shapes") {
  const auto cfg = small_config();
  const auto base = init_base<double>(cfg, 60);
  const auto h = encoder_forward<double>(random_ids(5, 30, 61), base, AdapterStack<double>::none());
  CHECK(head_forward(h, init_head<double>(HeadKind::SeqCls, {"a", "b"}, 16, 1)).shape() == ad::Shape{1, 2});
  CHECK(head_forward(h, mlm_head(base)).shape() == ad::Shape{5, 30});
  CHECK(head_forward(h, init_head<double>(HeadKind::TokCls, {"a", "b", "c", "d", "e", "f", "g"}, 16, 1)).shape() ==
        ad::Shape{5, 7});
  CHECK_THROWS_AS(init_head<double>(HeadKind::SeqCls, {"only"}, 16, 1), TrainError);
}

TEST_CASE("checkpoint round trips are bitwise") {
  const auto cfg = small_config();
  const auto base = init_base<float>(cfg, 70);
  save_base(temp_path("base.ckpt"), base);
  const auto back = load_base<float>(temp_path("base.ckpt"));
  CHECK(back.config == cfg);
  const auto a = base.named();
  const auto b = back.named();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(a[i].second.shape() == b[i].second.shape());
    CHECK(std::memcmp(a[i].second.data().data(), b[i].second.data().data(), a[i].second.size() * sizeof(float)) == 0);
  }
  auto adapter = init_adapter<float>(cfg, 4, 71);
  perturb(adapter, 72);
  save_adapter(temp_path("a.ckpt"), adapter, cfg);
  const auto ab = load_adapter<float>(temp_path("a.ckpt"), cfg);
  CHECK(std::memcmp(ab.layers[1].w_up.data().data(), adapter.layers[1].w_up.data().data(),
                    adapter.layers[1].w_up.size() * sizeof(float)) == 0);
  const auto head = init_head<float>(HeadKind::TokCls, {"O", "B-LOC"}, 16, 73);
  save_head(temp_path("h.ckpt"), head);
  const auto hb = load_head<float>(temp_path("h.ckpt"), 16);
  CHECK(hb.labels == head.labels);
  CHECK(hb.kind == HeadKind::TokCls);
}

TEST_CASE("adapter with a different reduction factor or width is rejected") {
  auto cfg = EncoderConfig{};
  cfg.validate();
  const auto adapter = init_adapter<float>(cfg, 16, 80);
  save_adapter(temp_path("r16.ckpt"), adapter, cfg);
  try {
    load_adapter<float>(temp_path("r16.ckpt"), cfg, 8);
    FAIL("expected ConfigMismatch");
  } catch (const ModelError& e) {
    CHECK(e.kind() == ModelError::Kind::ConfigMismatch);
    CHECK(std::string(e.what()).find("16") != std::string::npos);
  }
  auto wider = cfg;
  wider.d_model = 128;
  wider.d_ff = 256;
  CHECK_THROWS_AS(load_adapter<float>(temp_path("r16.ckpt"), wider), ModelError);
}

TEST_CASE("corrupt checkpoints raise FormatError") {
  const auto cfg = small_config();
  const auto head = init_head<float>(HeadKind::SeqCls, {"a", "b"}, 16, 90);
  save_head(temp_path("ok.ckpt"), head);
  std::ifstream in(temp_path("ok.ckpt"), std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  auto expect_format = [](const fs::path& p) {
    try {
      load_head<float>(p, 16);
      FAIL("expected FormatError");
    } catch (const ModelError& e) {
      CHECK(e.kind() == ModelError::Kind::FormatError);
    }
  };
  {
    std::ofstream out(temp_path("bad_magic.ckpt"), std::ios::binary);
    out << "NOTMAGIC" << bytes.substr(8);
  }
  expect_format(temp_path("bad_magic.ckpt"));
  {
    std::ofstream out(temp_path("short.ckpt"), std::ios::binary);
    out << bytes.substr(0, bytes.size() - 4);
  }
  expect_format(temp_path("short.ckpt"));
  {
    // Shape says 2x16 but claim a 3x16 tensor in the manifest.
    std::string edited = bytes;
    const auto pos = edited.find("[2,16]");
    REQUIRE(pos != std::string::npos);
    edited.replace(pos, 6, "[3,16]");
    std::ofstream out(temp_path("shape.ckpt"), std::ios::binary);
    out << edited;
  }
  expect_format(temp_path("shape.ckpt"));
  (void)cfg;
}
