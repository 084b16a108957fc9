#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "glsb/records.hpp"

namespace glsb {

struct FetchOptions {
    std::string site = "pm";
    int page_size = 30;
    /// Scheme + host, e.g. "https://api.stackexchange.com" or a mock server.
    std::string base_url = "https://api.stackexchange.com";
    std::filesystem::path cache_dir;
    /// Snapshot date used in the cache key; empty means "today" when writing
    /// and "latest cached snapshot" when reading.
    std::string fetch_date;
    int max_retries = 3;
    std::optional<std::string> api_key;
};

struct FetchProgress {
    std::size_t done = 0;
    std::size_t total = 0;
    PostId question_id = 0;
    bool from_cache = false;
};

/// Fetches related-question lists one id per request (the endpoint merges
/// results for multi-id requests, which would lose the source question).
/// Raw response bodies are cached under
///   <cache_dir>/<site>/<question id>/<fetch date>.json
/// so reruns are offline-reproducible.
class RelatedFetcher {
public:
    using Sleeper = std::function<void(std::chrono::seconds)>;
    using ProgressFn = std::function<void(const FetchProgress&)>;

    explicit RelatedFetcher(FetchOptions options);

    /// Injectable for tests; defaults to std::this_thread::sleep_for.
    void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }
    void set_progress(ProgressFn progress) { progress_ = std::move(progress); }

    std::vector<RelatedEdgeRecord> fetch(const std::vector<PostId>& question_ids);

    /// Number of HTTP requests issued since construction.
    std::size_t requests_issued() const { return requests_; }

private:
    std::optional<std::string> cached_body(PostId id) const;
    void write_cache(PostId id, const std::string& body) const;
    std::optional<std::string> fetch_remote(PostId id);

    FetchOptions options_;
    Sleeper sleeper_;
    ProgressFn progress_;
    std::size_t requests_ = 0;
    std::chrono::seconds pending_backoff_{0};
};

/// Extracts (source, target, rank) edges from one related response body.
std::vector<RelatedEdgeRecord> parse_related_response(PostId source, const std::string& body);

}  // namespace glsb
