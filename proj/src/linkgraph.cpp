#include "glsb/linkgraph.hpp"

#include <algorithm>

#include "glsb/error.hpp"

namespace glsb {

std::string_view to_string(EdgeKind kind) { return kind == EdgeKind::Linked ? "linked" : "related"; }

namespace {

using EdgeKey = std::tuple<PostId, PostId, EdgeKind>;

}  // namespace

DiscussionGraph DiscussionGraph::build(std::span<const PostLinkRecord> postlinks,
                                       std::span<const RelatedEdgeRecord> related,
                                       const Corpus& corpus) {
    if (!related.empty()) {
        const auto origin = related.front().origin;
        for (const auto& e : related) {
            if (e.origin != origin)
                throw Error(ErrorCode::InvalidArgument,
                            "related edges of different origins cannot be mixed in one graph");
        }
    }

    GraphBuildReport report;
    std::map<EdgeKey, int> merged;
    auto add = [&](PostId s, PostId t, EdgeKind kind) {
        if (s == t) {
            ++report.self_edges_dropped;
            return;
        }
        ++merged[{s, t, kind}];
    };

    for (const auto& link : postlinks) {
        if (link.kind == LinkKind::Duplicate) {
            ++report.duplicates_dropped;
            continue;
        }
        const auto s = corpus.question_of(link.source_post_id);
        const auto t = corpus.question_of(link.target_post_id);
        if ((s && *s != link.source_post_id) || (t && *t != link.target_post_id))
            ++report.lifted_from_answers;
        add(s.value_or(link.source_post_id), t.value_or(link.target_post_id), EdgeKind::Linked);
    }
    for (const auto& e : related) add(e.source_question_id, e.target_question_id, EdgeKind::Related);

    std::vector<PostId> nodes;
    for (const auto& d : corpus.discussions()) nodes.push_back(d.id());
    std::vector<GraphEdge> edges;
    for (const auto& [key, count] : merged) {
        const auto& [s, t, kind] = key;
        edges.push_back({s, t, kind, count, false});
    }
    auto graph = from_edges(nodes, edges);
    report.external_edges = graph.report_.external_edges;
    graph.report_ = report;
    return graph;
}

DiscussionGraph DiscussionGraph::from_edges(std::span<const PostId> nodes,
                                            std::span<const GraphEdge> edges) {
    DiscussionGraph g;
    g.nodes_.insert(nodes.begin(), nodes.end());
    const IdSet internal = g.nodes_;

    std::map<EdgeKey, int> merged;
    for (const auto& e : edges) {
        if (e.source == e.target) {
            ++g.report_.self_edges_dropped;
            continue;
        }
        merged[{e.source, e.target, e.kind}] += std::max(1, e.multiplicity);
    }
    for (const auto& [key, count] : merged) {
        const auto& [s, t, kind] = key;
        const bool external = internal.count(s) == 0 || internal.count(t) == 0;
        for (const auto id : {s, t}) {
            if (internal.count(id) == 0) {
                g.external_.insert(id);
                g.nodes_.insert(id);
            }
        }
        if (external) ++g.report_.external_edges;
        g.edges_.push_back({s, t, kind, count, external});
    }
    g.index();
    return g;
}

void DiscussionGraph::index() {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        out_[edges_[i].source].push_back(i);
        in_[edges_[i].target].push_back(i);
    }
}

IdSet DiscussionGraph::out_neighbors(const IdSet& ids, EdgeKind kind) const {
    IdSet result;
    for (const auto id : ids) {
        auto it = out_.find(id);
        if (it == out_.end()) continue;
        for (const auto i : it->second) {
            if (edges_[i].kind == kind && ids.count(edges_[i].target) == 0)
                result.insert(edges_[i].target);
        }
    }
    return result;
}

IdSet DiscussionGraph::in_neighbors(const IdSet& ids, EdgeKind kind) const {
    IdSet result;
    for (const auto id : ids) {
        auto it = in_.find(id);
        if (it == in_.end()) continue;
        for (const auto i : it->second) {
            if (edges_[i].kind == kind && ids.count(edges_[i].source) == 0)
                result.insert(edges_[i].source);
        }
    }
    return result;
}

CitationCount DiscussionGraph::citation_count(PostId id, CitationMode mode) const {
    if (!contains(id))
        throw Error(ErrorCode::NotFound, "discussion " + std::to_string(id) + " is not in the graph");
    CitationCount c;
    auto it = in_.find(id);
    if (it != in_.end()) {
        for (const auto i : it->second) {
            const int weight = mode == CitationMode::PerLink ? edges_[i].multiplicity : 1;
            (edges_[i].kind == EdgeKind::Linked ? c.linked_in : c.related_in) += weight;
        }
    }
    c.total = c.linked_in + c.related_in;
    return c;
}

std::vector<std::pair<PostId, CitationCount>> DiscussionGraph::top_cited(const IdSet& ids,
                                                                         std::size_t n,
                                                                         CitationMode mode) const {
    std::vector<std::pair<PostId, CitationCount>> ranked;
    for (const auto id : ids) ranked.emplace_back(id, citation_count(id, mode));
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.total != b.second.total) return a.second.total > b.second.total;
        return a.first < b.first;
    });
    if (ranked.size() > n) ranked.resize(n);
    return ranked;
}

void DiscussionGraph::write_edge_list(std::ostream& out) const {
    for (const auto& e : edges_) {
        out << e.source << '\t' << e.target << '\t' << to_string(e.kind) << '\t' << e.multiplicity
            << '\n';
    }
}

}  // namespace glsb
