#pragma once

#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string_view>
#include <tuple>
#include <vector>

#include "glsb/corpus.hpp"
#include "glsb/records.hpp"

namespace glsb {

using IdSet = std::set<PostId>;

enum class EdgeKind { Linked, Related };
std::string_view to_string(EdgeKind kind);

struct GraphEdge {
    PostId source = 0;
    PostId target = 0;
    EdgeKind kind = EdgeKind::Linked;
    int multiplicity = 1;  // post-level links collapsed into this edge
    bool external = false; // an endpoint is not a corpus question

    bool operator==(const GraphEdge&) const = default;
};

struct GraphBuildReport {
    std::size_t duplicates_dropped = 0;
    std::size_t self_edges_dropped = 0;
    std::size_t external_edges = 0;
    std::size_t lifted_from_answers = 0;
};

/// How incoming edges are counted as citations: every post-level link
/// occurrence, or one per citing discussion.
enum class CitationMode { PerLink, PerSource };

struct CitationCount {
    int linked_in = 0;
    int related_in = 0;
    int total = 0;
    bool operator==(const CitationCount&) const = default;
};

/// Directed multigraph over discussions (question ids). Immutable once built.
class DiscussionGraph {
public:
    /// Lifts post-level links to their questions, drops duplicate-kind and
    /// self links, keeps unknown endpoints flagged as external. Related edges
    /// must all share one origin.
    static DiscussionGraph build(std::span<const PostLinkRecord> postlinks,
                                 std::span<const RelatedEdgeRecord> related,
                                 const Corpus& corpus);

    /// Direct construction; parallel edges of the same kind are merged by
    /// summing multiplicity. Edge endpoints absent from `nodes` are external.
    static DiscussionGraph from_edges(std::span<const PostId> nodes,
                                      std::span<const GraphEdge> edges);

    const std::vector<GraphEdge>& edges() const { return edges_; }
    const IdSet& nodes() const { return nodes_; }
    bool contains(PostId id) const { return nodes_.count(id) != 0; }
    bool is_external(PostId id) const { return external_.count(id) != 0; }
    const GraphBuildReport& report() const { return report_; }

    /// Targets of `kind` edges leaving any of `ids`, minus `ids` themselves.
    IdSet out_neighbors(const IdSet& ids, EdgeKind kind) const;
    /// Sources of `kind` edges entering any of `ids`, minus `ids` themselves.
    IdSet in_neighbors(const IdSet& ids, EdgeKind kind) const;

    CitationCount citation_count(PostId id, CitationMode mode = CitationMode::PerLink) const;

    /// Descending total, ascending id on ties; at most n entries.
    std::vector<std::pair<PostId, CitationCount>> top_cited(
        const IdSet& ids, std::size_t n, CitationMode mode = CitationMode::PerLink) const;

    /// One edge per line: source \t target \t kind \t multiplicity
    void write_edge_list(std::ostream& out) const;

private:
    void index();

    IdSet nodes_;
    IdSet external_;
    std::vector<GraphEdge> edges_;  // sorted by (source, target, kind)
    std::map<PostId, std::vector<std::size_t>> out_;
    std::map<PostId, std::vector<std::size_t>> in_;
    GraphBuildReport report_;
};

}  // namespace glsb
