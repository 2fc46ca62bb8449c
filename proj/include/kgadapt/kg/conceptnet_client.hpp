// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "kgadapt/kg/relation.hpp"
#include "kgadapt/kg/triple.hpp"

namespace kgadapt::kg {

struct PageResponse {
  int status = 0;  // HTTP status; 0 means the request never completed
  std::string body;
  std::string error;  // transport-level message when status == 0
};

/// Source of raw API pages. `url` is the first query or a `view.nextPage`
/// link relative to the endpoint.
class PageSource {
 public:
  virtual ~PageSource() = default;
  virtual PageResponse get(const std::string& url) = 0;
  /// Human-readable location of the last page, used in error messages.
  virtual std::string describe(const std::string& url) const { return url; }
};

/// Live HTTP(S) client for a ConceptNet endpoint such as
/// "https://api.conceptnet.io".
class HttpPageSource : public PageSource {
 public:
  explicit HttpPageSource(std::string endpoint, std::chrono::seconds timeout = std::chrono::seconds(30));
  PageResponse get(const std::string& url) override;
  std::string describe(const std::string& url) const override { return endpoint_ + url; }

 private:
  std::string endpoint_;
  std::chrono::seconds timeout_;
};

/// Recorded pages: the numbered JSON files of a directory, served in numeric
/// order one per request (the first request gets the lowest number).
class FixturePageSource : public PageSource {
 public:
  explicit FixturePageSource(const std::filesystem::path& dir);
  PageResponse get(const std::string& url) override;
  std::string describe(const std::string& url) const override;

  std::size_t page_count() const { return files_.size(); }

 private:
  std::vector<std::filesystem::path> files_;
  std::size_t next_ = 0;
  std::size_t last_ = 0;
};

struct RetryPolicy {
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};
};

struct FetchOptions {
  std::string language;
  std::size_t page_limit = 1;
  std::size_t page_size = 1000;
  /// Empty means every relation; otherwise records with other relations are
  /// dropped from the stream.
  std::set<Relation> relation_filter;
  RetryPolicy retry;
  /// Injected so tests do not wait on real backoff.
  std::function<void(std::chrono::milliseconds)> sleep;
};

/// The first query path for a language: every edge touching /c/<lang>.
std::string initial_query(const std::string& language, std::size_t page_size);

/// Streams raw edge records page by page into `sink`, following
/// `view.nextPage` until it is absent or `page_limit` pages were read.
/// Returns the number of pages read.
std::size_t fetch_edges(const FetchOptions& options, PageSource& source,
                        const std::function<void(const nlohmann::json&)>& sink);

std::vector<nlohmann::json> fetch_edges(const FetchOptions& options, PageSource& source);

struct ExtractStats {
  std::size_t raw_records = 0;
  std::size_t pages = 0;
  std::size_t kept = 0;
  std::size_t skipped_unknown_relation = 0;
  std::size_t skipped_empty_label = 0;
  std::size_t skipped_missing_language = 0;
};

/// fetch_edges followed by parse_edge against the requested language.
std::vector<Triple> extract_triples(const FetchOptions& options, PageSource& source, ExtractStats* stats = nullptr);

}  // namespace kgadapt::kg
