#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glsb/linkgraph.hpp"
#include "glsb/rational.hpp"
#include "glsb/snowball.hpp"

namespace glsb::metrics {

/// valid / candidates; absent when there were no candidates.
std::optional<Rational> precision(std::int64_t candidates, std::int64_t valid);

/// Sum of valid over sum of candidates; absent when no candidates at all.
std::optional<Rational> combined_precision(std::span<const std::pair<std::int64_t, std::int64_t>> sources);

/// new_valid / start_valid, the relative gain over the start set.
std::optional<Rational> recall_gain(std::int64_t start_valid, std::int64_t new_valid);

struct SourceMetrics {
    std::string name;     // "search", "LinkedBSB", ..., "AllSB"
    std::string display;  // "Search", "Linked BSB", ...
    std::int64_t candidates = 0;
    std::int64_t valid = 0;
    std::optional<Rational> precision;
};

struct GroupMetrics {
    std::string name;  // "LinkedSB", "RelatedSB", "Combined"
    std::string display;
    std::vector<std::string> members;
    std::optional<Rational> precision;
};

struct MetricsReport {
    std::vector<SourceMetrics> sources;
    std::vector<GroupMetrics> groups;
    std::optional<Rational> combined_precision;  // search + AllSB
    std::int64_t start_valid = 0;
    std::int64_t new_valid = 0;
    std::optional<Rational> recall_gain;
    std::map<Provenance, std::size_t> overlap;
    std::vector<std::pair<PostId, CitationCount>> top_cited;
    std::string generated_at;

    const SourceMetrics& source(std::string_view name) const;
};

struct ReportInputs {
    IdSet search_candidates;
    IdSet search_valid;
    /// Passing snowball candidates across iterations.
    std::vector<Candidate> snowball_candidates;
    IdSet snowball_valid;
    std::vector<std::pair<PostId, CitationCount>> top_cited;
    std::string generated_at;
};

/// Per-strategy rows count multi-provenance candidates once per strategy;
/// AllSB counts unique candidates.
MetricsReport build_report(const ReportInputs& inputs);

enum class ReportFormat { Structured, Table };
ReportFormat report_format_from_string(std::string_view text);

/// Byte-deterministic rendering. Structured: one JSON record per line.
/// Table: markdown with per-strategy precision lines and the overlap table.
std::string emit_report(const MetricsReport& report, ReportFormat format);

}  // namespace glsb::metrics
