// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include "kgadapt/kg/conceptnet_client.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "kgadapt/error.hpp"

namespace kgadapt::kg {

using nlohmann::json;

HttpPageSource::HttpPageSource(std::string endpoint, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  while (endpoint_.ends_with('/')) endpoint_.pop_back();
}

PageResponse HttpPageSource::get(const std::string& url) {
  httplib::Client client(endpoint_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  auto res = client.Get(url);
  if (!res) return PageResponse{0, {}, httplib::to_string(res.error())};
  return PageResponse{res->status, res->body, {}};
}

namespace {

// First run of digits in the file stem, used to order fixture pages.
long page_number(const std::filesystem::path& p) {
  const std::string stem = p.stem().string();
  auto it = std::find_if(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); });
  if (it == stem.end()) return -1;
  long n = 0;
  for (; it != stem.end() && std::isdigit(static_cast<unsigned char>(*it)); ++it) n = n * 10 + (*it - '0');
  return n;
}

}  // namespace

FixturePageSource::FixturePageSource(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw IngestError(IngestError::Kind::Io, "fixture directory " + dir.string() + " does not exist");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json" && page_number(entry.path()) >= 0)
      files_.push_back(entry.path());
  }
  std::sort(files_.begin(), files_.end(), [](const auto& a, const auto& b) {
    const long na = page_number(a), nb = page_number(b);
    return na != nb ? na < nb : a.filename() < b.filename();
  });
}

PageResponse FixturePageSource::get(const std::string&) {
  if (next_ >= files_.size()) return PageResponse{404, {}, "fixture exhausted"};
  last_ = next_;
  std::ifstream in(files_[next_++], std::ios::binary);
  if (!in) return PageResponse{0, {}, "cannot read " + files_[last_].string()};
  return PageResponse{200, std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()), {}};
}

std::string FixturePageSource::describe(const std::string& url) const {
  if (last_ < files_.size()) return files_[last_].string() + " (" + url + ")";
  return url;
}

std::string initial_query(const std::string& language, std::size_t page_size) {
  return "/query?node=/c/" + language + "&limit=" + std::to_string(page_size);
}

namespace {

bool transient(int status) { return status == 0 || status == 429 || status >= 500; }

PageResponse get_with_retry(const FetchOptions& options, PageSource& source, const std::string& url) {
  auto delay = options.retry.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    PageResponse res = source.get(url);
    if (res.status == 200) return res;
    const std::string what = res.status == 0 ? res.error : "HTTP " + std::to_string(res.status);
    if (!transient(res.status))
      throw IngestError(IngestError::Kind::Transport, "GET " + source.describe(url) + " failed: " + what);
    if (attempt >= options.retry.max_retries)
      throw IngestError(IngestError::Kind::Transport, "GET " + source.describe(url) + " failed after " +
                                                         std::to_string(attempt + 1) + " attempts: " + what);
    if (options.sleep) options.sleep(delay);
    else std::this_thread::sleep_for(delay);
    const auto next = std::chrono::milliseconds(static_cast<long long>(delay.count() * options.retry.multiplier));
    delay = std::min(next, options.retry.max_backoff);
  }
}

}  // namespace

std::size_t fetch_edges(const FetchOptions& options, PageSource& source,
                        const std::function<void(const nlohmann::json&)>& sink) {
  if (options.page_limit < 1) throw std::invalid_argument("fetch_edges: page_limit must be at least 1");
  std::string url = initial_query(options.language, options.page_size);
  std::size_t pages = 0;
  while (pages < options.page_limit) {
    const PageResponse res = get_with_retry(options, source, url);
    json page;
    try {
      page = json::parse(res.body);
    } catch (const json::parse_error& e) {
      throw IngestError(IngestError::Kind::Parse, "malformed JSON page " + source.describe(url) + ": " + e.what());
    }
    auto edges = page.find("edges");
    if (!page.is_object() || edges == page.end() || !edges->is_array())
      throw IngestError(IngestError::Kind::Parse, "page " + source.describe(url) + " has no 'edges' array");
    for (const auto& edge : *edges) {
      if (!options.relation_filter.empty()) {
        const json* rel = edge.is_object() && edge.contains("rel") ? &edge["rel"] : nullptr;
        const auto id = rel && rel->is_object() && rel->contains("@id") && (*rel)["@id"].is_string()
                            ? relation_from_name((*rel)["@id"].get<std::string>())
                            : std::nullopt;
        if (!id || !options.relation_filter.contains(*id)) continue;
      }
      sink(edge);
    }
    ++pages;
    auto view = page.find("view");
    if (view == page.end() || !view->is_object()) break;
    auto next = view->find("nextPage");
    if (next == view->end() || !next->is_string() || next->get_ref<const std::string&>().empty()) break;
    url = next->get<std::string>();
  }
  return pages;
}

std::vector<nlohmann::json> fetch_edges(const FetchOptions& options, PageSource& source) {
  std::vector<json> out;
  fetch_edges(options, source, [&](const json& e) { out.push_back(e); });
  return out;
}

std::vector<Triple> extract_triples(const FetchOptions& options, PageSource& source, ExtractStats* stats) {
  ExtractStats local;
  std::vector<Triple> out;
  local.pages = fetch_edges(options, source, [&](const json& raw) {
    ++local.raw_records;
    const ParsedEdge parsed = parse_edge(raw, options.language);
    if (const auto* t = std::get_if<Triple>(&parsed)) {
      out.push_back(*t);
      ++local.kept;
      return;
    }
    switch (std::get<Skip>(parsed).reason) {
      case SkipReason::UnknownRelation: ++local.skipped_unknown_relation; break;
      case SkipReason::EmptyLabel: ++local.skipped_empty_label; break;
      case SkipReason::MissingLanguage: ++local.skipped_missing_language; break;
    }
  });
  if (stats) *stats = local;
  return out;
}

}  // namespace kgadapt::kg
