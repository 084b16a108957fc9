#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "glsb/corpus.hpp"
#include "glsb/linkgraph.hpp"
#include "glsb/metrics.hpp"
#include "glsb/review.hpp"
#include "glsb/search.hpp"
#include "glsb/similarity.hpp"
#include "glsb/snowball.hpp"

namespace glsb {

struct ProjectConfig {
    std::string id;
    std::filesystem::path corpus_dir;
    SearchSpec search;
    similarity::SimilarityConfig similarity;
    /// Absent: thresholds default to the floor of the start-set averages.
    std::optional<FrontierFilter> frontier;
    EdgeOrigin related_origin = EdgeOrigin::Api;
    review::LabelSchema schema = review::LabelSchema::default_schema();
    CitationMode citation_mode = CitationMode::PerLink;
    std::size_t top_cited = 5;
};

void to_json(nlohmann::json& j, const ProjectConfig& c);
void from_json(const nlohmann::json& j, ProjectConfig& c);

enum class IterationKind { Search, Snowball };

struct IterationState {
    int index = 0;
    IterationKind kind = IterationKind::Search;
    std::string started_at;
    std::optional<std::string> request_token;
    std::optional<FrontierFilter> filter;  // snowball iterations
    IdSet start_ids;                       // snowball iterations
    std::size_t candidate_count = 0;       // passing candidates
};

/// Result row of the search (start-set) iteration.
struct SearchCandidate {
    SearchMatch match;
    bool passed_filters = true;
    std::optional<ExclusionReason> excluded_reason;  // incomplete / untrustworthy
};

/// Corpus and graph loaded for a project; immutable and shared between
/// project snapshots.
struct Workspace {
    Corpus corpus;
    DiscussionGraph graph;
};

/// A screening project persisted as a directory:
///   project.json          config + iteration states
///   iterations/NNN.jsonl  candidates of each iteration
///   labels.jsonl          append-only review audit log
/// Not thread-safe; the service serializes writers and hands out copies.
class Project {
public:
    static Project create(const std::filesystem::path& dir, ProjectConfig config,
                          const std::optional<std::string>& request_token = {});
    static Project open(const std::filesystem::path& dir);

    const std::filesystem::path& dir() const { return dir_; }
    const ProjectConfig& config() const { return config_; }
    const std::optional<std::string>& creation_token() const { return creation_token_; }
    const std::vector<IterationState>& iterations() const { return iterations_; }
    const review::ReviewLog& log() const { return log_; }

    const Workspace& workspace() const;

    /// Iteration 0: string search, then the completeness and trust filters.
    const IterationState& run_start_set(const std::optional<std::string>& request_token = {},
                                        const std::string& now = {});

    /// Next snowball iteration from every valid discussion so far. Blocked
    /// while the active iteration has undecided candidates.
    const IterationState& run_snowball(const std::optional<FrontierFilter>& filter_override = {},
                                       const std::optional<std::string>& request_token = {},
                                       const std::string& now = {});

    review::ConsensusState submit_label(review::Label label,
                                        const std::optional<std::string>& request_token = {},
                                        const std::string& now = {});

    std::vector<PostId> screening_queue(const std::string& reviewer) const;
    IdSet valid_set(int iteration) const;

    /// Passing candidate ids of one iteration.
    IdSet candidate_ids(int iteration) const;
    const std::vector<SearchCandidate>& search_candidates() const { return search_; }
    /// All candidates (including rejected) of a snowball iteration.
    const std::vector<Candidate>& snowball_candidates(int iteration) const;

    metrics::MetricsReport report() const;
    std::string render_report(metrics::ReportFormat format) const;

    /// Full thread for rendering: posts, comments, hits, links, review state.
    nlohmann::json discussion_view(PostId id) const;

    /// Latest mutation timestamp recorded in the project state.
    std::string as_of() const;

private:
    Project() = default;
    void save_manifest() const;
    void load_iterations();
    IdSet examined_ids() const;
    IdSet all_valid() const;
    std::filesystem::path iteration_file(int index) const;

    std::filesystem::path dir_;
    ProjectConfig config_;
    std::optional<std::string> creation_token_;
    std::string created_at_;
    std::vector<IterationState> iterations_;
    std::vector<SearchCandidate> search_;
    std::vector<std::vector<Candidate>> snowball_;  // index i -> iteration i+1
    review::ReviewLog log_{review::LabelSchema::default_schema()};
    mutable std::shared_ptr<const Workspace> workspace_;
};

}  // namespace glsb
