// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "kgadapt/cli/cli.hpp"

using namespace kgadapt;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = KGADAPT_TEST_FIXTURES;

struct Run {
  int code = 0;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "kgadapt_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

std::string fx(const std::string& rel) { return (kFixtures / rel).string(); }

const std::vector<std::string> kSmallEncoder{"--n-layers", "1", "--d-model", "16", "--n-heads", "2",
                                             "--d-ff",     "32", "--vocab-size", "200", "--max-seq-len", "24"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("usage errors exit with 2 and help with 0") {
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
  CHECK(invoke({"corpus", "--triples", fx("mt.jsonl"), "--out", "x.jsonl", "--bogus"}).code == cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({"train-ta", "--task", "pos", "--data", fx("sa10.jsonl")}).code == cli::kExitUsage);
  CHECK(invoke({"train-ta", "--task", "sa", "--data", fx("sa10.jsonl"), "--base", fx("mt.jsonl")}).code ==
        cli::kExitUsage);
  CHECK(invoke({"train-la", "--corpus", fx("plain.jsonl"), "--objective", "xlm"}).code == cli::kExitUsage);
}

TEST_CASE("fetch and corpus write their outputs and manifests") {
  const auto dir = scratch("ingest");
  const auto triples = (dir / "mt_triples.jsonl").string();
  const auto f = invoke({"fetch", "--lang", "mt", "--fixture", fx("conceptnet/mt"), "--page-limit", "5", "--out", triples});
  CHECK(f.code == 0);
  CHECK(line_count(triples) == 38);
  CHECK(fs::exists(triples + ".manifest.json"));
  CHECK(nlohmann::json::parse(f.out)["kept"] == 38);

  const auto corpus = (dir / "c.jsonl").string();
  const auto c = invoke({"corpus", "--triples", fx("mt.jsonl"), "--out", corpus});
  CHECK(c.code == 0);
  CHECK(line_count(corpus) == 40);
  const auto stats = nlohmann::json::parse(c.out);
  CHECK(stats["sentences"] == 40);
  const auto manifest = nlohmann::json::parse(read_file(corpus + ".manifest.json"));
  CHECK(manifest["command"] == "corpus");
  CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("domain errors exit with 1 and name the error class") {
  const auto dir = scratch("domain");
  const auto r = invoke({"train-la", "--objective", "tlm", "--corpus", fx("plain.jsonl"), "--out", (dir / "la").string()});
  CHECK(r.code == cli::kExitDomainError);
  CHECK(r.err.find("ObjectiveDataMismatch") != std::string::npos);
  CHECK(r.err.find("hint:") != std::string::npos);
  const auto missing = invoke({"eval", "--run", dir.string(), "--data", fx("sa10.jsonl")});
  CHECK(missing.code == cli::kExitDomainError);
}

TEST_CASE("rerunning from a manifest reproduces the outputs") {
  const auto dir = scratch("rerun");
  const auto corpus = (dir / "c.jsonl").string();
  REQUIRE(invoke({"corpus", "--triples", fx("mt.jsonl"), "--out", corpus}).code == 0);
  const auto first = (dir / "first").string();
  const auto a = invoke(with({"train-la", "--corpus", corpus, "--objective", "tlm", "--max-steps", "12",
                           "--eval-every", "4", "--lr", "1e-3", "--seed", "9", "--out", first},
                          kSmallEncoder));
  REQUIRE(a.code == 0);
  const auto manifest = nlohmann::json::parse(read_file(fs::path(first) / "run_manifest.json"));
  CHECK(manifest["seed"] == 9);
  CHECK(manifest["config"]["train"]["objective"] == "tlm");
  CHECK(manifest["config"]["train"]["masking"]["p_tlm"] == 0.5);

  const auto second = (dir / "second").string();
  const auto b = invoke({"train-la", "--corpus", corpus, "--config", (fs::path(first) / "run_manifest.json").string(),
                      "--out", second});
  REQUIRE(b.code == 0);
  for (const auto* name : {"adapter.ckpt", "base.ckpt", "vocab.json", "run_record.jsonl", "summary.json",
                           "config.json"}) {
    CAPTURE(name);
    CHECK(read_file(fs::path(first) / name) == read_file(fs::path(second) / name));
  }
}

TEST_CASE("flags override the config file, which overrides the preset") {
  const auto dir = scratch("layers");
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"lr": 0.002, "batch_size": 4, "max_steps": 3, "eval_every": 3})";
  }
  const auto out = (dir / "run").string();
  const auto r = invoke(with({"train-la", "--corpus", fx("plain.jsonl"), "--config", (dir / "cfg.json").string(),
                           "--batch-size", "2", "--out", out},
                          kSmallEncoder));
  REQUIRE(r.code == 0);
  const auto cfg = nlohmann::json::parse(read_file(fs::path(out) / "config.json"));
  CHECK(cfg["lr"] == 0.002);
  CHECK(cfg["batch_size"] == 2);
  CHECK(cfg["reduction_factor"] == 16);
  CHECK(cfg["objective"] == "mlm");
}

TEST_CASE("pipeline: language adapter, stacked task adapter, evaluation") {
  const auto dir = scratch("pipeline");
  const auto corpus = (dir / "c.jsonl").string();
  REQUIRE(invoke({"corpus", "--triples", fx("mt.jsonl"), "--out", corpus}).code == 0);
  const auto la = (dir / "la").string();
  REQUIRE(invoke(with({"train-la", "--corpus", corpus, "--max-steps", "6", "--eval-every", "3", "--out", la},
                   kSmallEncoder))
              .code == 0);
  const auto base = (fs::path(la) / "base.ckpt").string();
  const auto vocab = (fs::path(la) / "vocab.json").string();
  const auto adapter = (fs::path(la) / "adapter.ckpt").string();
  const auto ta = (dir / "ta").string();
  const auto t = invoke({"train-ta", "--task", "sa", "--data", fx("sa10.jsonl"), "--lang-adapter", adapter, "--base", base,
                      "--vocab", vocab, "--max-steps", "6", "--eval-every", "3", "--batch-size", "4", "--out", ta});
  REQUIRE(t.code == 0);
  CHECK(fs::exists(fs::path(ta) / "bundle.json"));
  CHECK(fs::exists(fs::path(ta) / "run_manifest.json"));
  CHECK(line_count(fs::path(ta) / "run_record.jsonl") == 2);

  const auto fusion = invoke({"train-ta", "--task", "sa", "--data", fx("sa10.jsonl"), "--lang-adapter", adapter,
                           "--lang-adapter", adapter, "--fusion", "--base", base, "--vocab", vocab, "--max-steps", "3",
                           "--batch-size", "4", "--out", (dir / "fu").string()});
  CHECK(fusion.code == 0);
  const auto one = invoke({"train-ta", "--task", "sa", "--data", fx("sa10.jsonl"), "--lang-adapter", adapter, "--fusion",
                        "--base", base, "--vocab", vocab, "--max-steps", "3", "--out", (dir / "bad").string()});
  CHECK(one.code == cli::kExitDomainError);
  CHECK(one.err.find("FusionArity") != std::string::npos);

  const auto full = (dir / "full").string();
  REQUIRE(invoke(with({"train-full", "--task", "sa", "--data", fx("sa10.jsonl"), "--max-steps", "4", "--batch-size", "4",
                    "--out", full},
                   kSmallEncoder))
              .code == 0);

  const auto report = (dir / "report.json").string();
  const auto e = invoke({"eval", "--run", ta, "--data", fx("sa10.jsonl"), "--out", report});
  REQUIRE(e.code == 0);
  const auto j = nlohmann::json::parse(e.out);
  CHECK(j["report_version"] == 1);
  CHECK(j["n_examples"] == 1);
  CHECK(read_file(report) == e.out);
  const auto again = invoke({"eval", "--run", ta, "--data", fx("sa10.jsonl")});
  CHECK(again.out == e.out);

  const auto agg = invoke({"eval", "--run", ta, "--run", full, "--data", fx("sa10.jsonl"), "--split", "train"});
  REQUIRE(agg.code == 0);
  const auto aj = nlohmann::json::parse(agg.out);
  CHECK(aj["runs"].size() == 2);
  const double mean = (aj["runs"][0]["f1"].get<double>() + aj["runs"][1]["f1"].get<double>()) / 2.0;
  CHECK(aj["aggregate"]["f1"].get<double>() == doctest::Approx(mean).epsilon(1e-12));
  CHECK(invoke({"eval", "--run", ta, "--data", fx("ner")}).code == cli::kExitDomainError);
}
