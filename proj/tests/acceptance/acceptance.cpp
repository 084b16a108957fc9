// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "glsb/corpus_store.hpp"
#include "glsb/jsonl.hpp"
#include "glsb/project.hpp"
#include "glsb/service.hpp"
#include "oracles/corpus_oracle.hpp"
#include "oracles/generators.hpp"
#include "oracles/graph_oracle.hpp"
#include "oracles/similarity_oracle.hpp"
#include "oracles/snowball_oracle.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace glsb;
using nlohmann::json;

namespace {

// Tolerances and limits.
constexpr double kPercentTolerance = 1.0;  // percentage points
constexpr double kRuntimeLimitSeconds = 5.0;
constexpr double kScoreRelTolerance = 1e-9;
constexpr int kSimilarityCorpora = 20;
constexpr int kGraphCases = 1000;
constexpr int kSnowballCases = 500;
constexpr int kFilterCases = 500;

struct Outcome {
    bool ok = true;
    std::string detail;

    void check(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

struct Paths {
    fs::path glsb;
    fs::path fixtures;
};

fs::path ingest_fixture(const fs::path& fixture, const fs::path& store) {
    ingest_dump(fixture / "dump", store);
    store_related_edges(store, read_jsonl<RelatedEdgeRecord>(fixture / "related.jsonl"));
    return store;
}

void replay_labels(Project& p, const fs::path& file) {
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = json::parse(line);
        std::optional<std::string> token;
        if (j.contains("request_token") && j["request_token"].is_string()) token = j["request_token"];
        j.erase("request_token");
        p.submit_label(j.get<review::Label>(), token, j.value("created_at", ""));
    }
}

std::string pct(const std::optional<Rational>& r) {
    if (!r) return "n/a";
    std::ostringstream out;
    out.precision(2);
    out << std::fixed << 100.0 * r->to_double();
    return out.str();
}

bool near_printed(const std::optional<Rational>& r, double printed) {
    return r && std::abs(100.0 * r->to_double() - printed) <= kPercentTolerance;
}

// 1 -------------------------------------------------------------------------

Outcome replay_counts(const Paths& paths) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    testing::TempDir tmp;
    const auto fixture = paths.fixtures / "replay_counts";
    const auto store = ingest_fixture(fixture, tmp / "store");
    ProjectConfig cfg;
    cfg.id = "replay";
    cfg.corpus_dir = store;
    cfg.search = SearchSpec{{"debt", "shortcut"}, SearchSpec::all_fields(), MatchMode::Substring};
    auto p = Project::create(tmp / "project", cfg);
    p.run_start_set();
    replay_labels(p, fixture / "labels_search.jsonl");
    p.run_snowball();
    replay_labels(p, fixture / "labels_snowball.jsonl");
    const auto r = p.report();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto cands = p.snowball_candidates(1);
    const auto counts = strategy_counts(cands);
    const auto singles = single_strategy_counts(cands);
    o.check(counts == std::array<std::size_t, 4>{34, 50, 104, 156}, "strategy-level counts");
    o.check(singles == std::array<std::size_t, 4>{25, 47, 61, 111}, "single-strategy counts");
    o.check(passing(cands).size() == 291, "unique candidates");

    const std::map<std::string, std::size_t> overlaps{{"RB+RF", 37}, {"LB+RB+RF", 4}, {"LB+RF", 2},
                                                    {"LB+LF+RB+RF", 1}, {"LB+RB", 1}, {"LB+LF", 1},
                                                    {"LF+RF", 1}};
    o.check(oracle::group_overlaps(cands) == overlaps, "overlap table");

    const std::vector<std::pair<std::string, std::int64_t>> valid{
        {"LinkedBSB", 15}, {"LinkedFSB", 19}, {"RelatedBSB", 59}, {"RelatedFSB", 69}, {"AllSB", 130},
        {"search", 108}};
    for (const auto& [name, v] : valid) o.check(r.source(name).valid == v, "valid count of " + name);
    o.check(r.source("search").candidates == 226, "search candidates");

    const std::vector<std::pair<std::string, double>> printed{
        {"LinkedBSB", 44}, {"LinkedFSB", 38}, {"RelatedBSB", 56}, {"RelatedFSB", 44}, {"AllSB", 45}, {"search", 48}};
    for (const auto& [name, value] : printed)
        o.check(near_printed(r.source(name).precision, value), "precision of " + name + " = " + pct(r.source(name).precision));
    o.check(near_printed(r.combined_precision, 46), "combined precision = " + pct(r.combined_precision));
    o.check(near_printed(r.recall_gain, 120), "recall gain = " + pct(r.recall_gain));
    o.check(seconds < kRuntimeLimitSeconds, "runtime " + std::to_string(seconds) + " s");

    if (o.ok) {
        std::ostringstream d;
        d << "LB " << pct(r.source("LinkedBSB").precision) << ", LF " << pct(r.source("LinkedFSB").precision)
          << ", RB " << pct(r.source("RelatedBSB").precision) << ", RF " << pct(r.source("RelatedFSB").precision)
          << ", AllSB " << pct(r.source("AllSB").precision) << ", combined " << pct(r.combined_precision)
          << ", gain " << pct(r.recall_gain) << ", " << seconds << " s";
        o.detail = d.str();
    }
    return o;
}

// 2 -------------------------------------------------------------------------

DiscussionGraph fixture_graph(const fs::path& fixture, const fs::path& store) {
    ingest_fixture(fixture, store);
    const auto records = read_corpus_store(store);
    const auto corpus = Corpus::assemble(records.posts, records.comments);
    return DiscussionGraph::build(records.postlinks, records.related, corpus);
}

Outcome citation_example(const Paths& paths) {
    Outcome o;
    testing::TempDir tmp;
    const auto g = fixture_graph(paths.fixtures / "citation", tmp / "store");
    const auto c = g.citation_count(26011);
    o.check(c == CitationCount{2, 1, 3}, "citation_count(26011) = (" + std::to_string(c.linked_in) + ", " +
                                              std::to_string(c.related_in) + ", " + std::to_string(c.total) + ")");
    if (o.ok) o.detail = "(2 linked, 1 related, 3 total)";
    return o;
}

// 3 -------------------------------------------------------------------------

Outcome top_cited_shape(const Paths& paths) {
    Outcome o;
    testing::TempDir tmp;
    const auto g = fixture_graph(paths.fixtures / "top_cited", tmp / "store");
    IdSet ids;
    for (const auto id : g.nodes())
        if (!g.is_external(id)) ids.insert(id);
    const auto top = g.top_cited(ids, 5);
    const std::vector<std::pair<PostId, CitationCount>> want{
        {8286, {0, 6, 6}}, {11144, {0, 6, 6}}, {718, {0, 4, 4}}, {15505, {0, 3, 3}}, {16372, {2, 1, 3}}};
    std::string got;
    for (const auto& [id, c] : top) got += std::to_string(id) + ":" + std::to_string(c.total) + " ";
    o.check(top == want, "top-5 was " + got);
    if (o.ok) o.detail = got.substr(0, got.size() - 1);
    return o;
}

// 4 -------------------------------------------------------------------------

Outcome similarity_oracle() {
    Outcome o;
    using namespace glsb::similarity;
    gen::Rng rng(2024);
    for (int k = 0; k < kSimilarityCorpora && o.ok; ++k) {
        SimilarityConfig cfg;
        cfg.top_k = gen::uniform(rng, 1, 15);
        cfg.max_query_terms = gen::uniform(rng, 1, 30);
        const auto corpus = Corpus::assemble(gen::similarity_posts(rng, gen::uniform(rng, 2, 100)), {});
        const auto index = Index::build(corpus.discussions(), cfg);
        SimilarityConfig scaled = cfg;
        const double f = 0.5 + k;
        scaled.weight_tags *= f;
        scaled.weight_title *= f;
        scaled.weight_body *= f;
        for (const auto& d : corpus.discussions()) {
            const auto got = more_like_this(d.id(), index, cfg);
            const auto want = oracle::brute_force_mlt(corpus.discussions(), d.id(), cfg);
            bool same = got.size() == want.size();
            for (std::size_t i = 0; same && i < got.size(); ++i)
                same = got[i].id == want[i].first &&
                       std::abs(got[i].score - want[i].second) <= kScoreRelTolerance * std::abs(want[i].second);
            o.check(same, "corpus " + std::to_string(k) + " source " + std::to_string(d.id()) + " differs from brute force");
            const auto rescaled = more_like_this(d.id(), index, scaled);
            bool order = rescaled.size() == got.size();
            for (std::size_t i = 0; order && i < got.size(); ++i) order = rescaled[i].id == got[i].id;
            o.check(order, "rescaling changed ranking for source " + std::to_string(d.id()));
        }
    }

    // Field-weight triples: the query term appears once in exactly one field of each candidate.
    const auto& vocab = gen::vocabulary();
    for (std::size_t t = 0; t < vocab.size() && o.ok; ++t) {
        const auto& w = vocab[t];
        if (w == "the" || w == "and") continue;
        auto q = [](PostId id, std::string title, std::string body, std::vector<std::string> tags) {
            return testing::question(id, 1, 0, std::move(title), std::move(body), std::move(tags));
        };
        const auto corpus = Corpus::assemble(
            std::vector<PostRecord>{q(1, w, w, {w}), q(2, "qqq", "zzz", {w}), q(3, w, "zzz", {"xxx"}),
                                    q(4, "qqq", w, {"xxx"})},
            {});
        const SimilarityConfig cfg;
        const auto r = more_like_this(1, Index::build(corpus.discussions(), cfg), cfg);
        o.check(r.size() == 3 && r[0].id == 2 && r[1].id == 3 && r[2].id == 4 && r[0].score > r[1].score &&
                    r[1].score > r[2].score,
                "field-weight ordering for term " + w);
    }
    if (o.ok) o.detail = std::to_string(kSimilarityCorpora) + " corpora, rescaling and field-weight triples";
    return o;
}

// 5 -------------------------------------------------------------------------

Outcome graph_duality() {
    Outcome o;
    gen::Rng rng(5);
    for (int round = 0; round < kGraphCases && o.ok; ++round) {
        const auto rg = gen::graph(rng, gen::uniform(rng, 1, 30), gen::uniform(rng, 0, 80));
        const auto g = DiscussionGraph::from_edges(rg.nodes, rg.edges);
        for (const auto kind : {EdgeKind::Linked, EdgeKind::Related}) {
            for (const auto x : g.nodes()) {
                for (const auto y : g.out_neighbors({x}, kind))
                    o.check(g.in_neighbors({y}, kind).count(x) == 1, "out/in duality");
                for (const auto y : g.in_neighbors({x}, kind))
                    o.check(g.out_neighbors({y}, kind).count(x) == 1, "in/out duality");
                o.check(g.out_neighbors({x}, kind) == oracle::scan_out(rg.edges, {x}, kind), "out-neighbors vs scan");
            }
        }
        long in_total = 0, out_total = 0, expected = 0;
        for (const auto id : g.nodes()) in_total += g.citation_count(id).total;
        for (const auto& e : g.edges()) out_total += e.multiplicity;
        for (const auto& e : rg.edges)
            if (e.source != e.target) expected += e.multiplicity;
        o.check(in_total == expected && out_total == expected, "edge-count conservation");
    }
    if (o.ok) o.detail = std::to_string(kGraphCases) + " random multigraphs";
    return o;
}

// 6 -------------------------------------------------------------------------

Outcome snowball_hygiene() {
    Outcome o;
    gen::Rng rng(6);
    for (int round = 0; round < kSnowballCases && o.ok; ++round) {
        std::vector<PostRecord> posts;
        std::vector<PostId> ids;
        const int n = gen::uniform(rng, 3, 30);
        for (int i = 1; i <= n; ++i) {
            const PostId id = i * 10;
            posts.push_back(testing::question(id, 1, gen::uniform(rng, -2, 10)));
            for (int a = 1; a <= gen::uniform(rng, 0, 5); ++a)
                posts.push_back(testing::answer(id * 100 + a, id, gen::uniform(rng, 0, 3) == 0 ? 1 : 2, gen::uniform(rng, -3, 3)));
            ids.push_back(id);
        }
        const auto corpus = Corpus::assemble(posts, {});
        std::vector<GraphEdge> edges;
        for (int i = gen::uniform(rng, 0, 4 * n); i > 0; --i) {
            auto pick = [&]() -> PostId {
                if (gen::uniform(rng, 0, 15) == 0) return 900000;
                return ids[static_cast<std::size_t>(gen::uniform(rng, 0, n - 1))];
            };
            edges.push_back({pick(), pick(), gen::uniform(rng, 0, 1) ? EdgeKind::Linked : EdgeKind::Related});
        }
        const auto graph = DiscussionGraph::from_edges(ids, edges);
        IdSet start, examined;
        for (const auto id : ids)
            if (gen::uniform(rng, 0, 3) == 0) start.insert(id);
        if (start.empty()) start.insert(ids.front());
        examined = start;
        for (const auto id : ids)
            if (gen::uniform(rng, 0, 5) == 0) examined.insert(id);
        FrontierFilter filter{gen::uniform(rng, 0, 4), gen::uniform(rng, 0, 8), {}};
        if (gen::uniform(rng, 0, 1)) filter.apply_to.insert(EdgeKind::Related);
        if (gen::uniform(rng, 0, 1)) filter.apply_to.insert(EdgeKind::Linked);

        const auto cs = run_iteration({"p", start, 1}, graph, corpus, filter, examined);
        for (const auto& c : cs) {
            if (!c.passed_filters) continue;
            o.check(start.count(c.id) == 0 && examined.count(c.id) == 0, "candidate in start or examined set");
            const auto* d = corpus.find(c.id);
            const bool below = d->answer_count < filter.min_answers || d->question.score < filter.min_score;
            for (auto s : c.reached.strategies()) {
                const bool filtered = filter.apply_to.count(edge_kind(s)) != 0;
                // A strategy is dropped exactly when it is filtered and the candidate is below threshold.
                o.check(c.provenance.has(s) == !(filtered && below), "threshold applied outside apply_to");
            }
        }
        const auto counts = strategy_counts(cs);
        const auto singles = single_strategy_counts(cs);
        std::size_t members = 0, groups = 0;
        for (const auto& [p, k] : overlap_table(cs)) {
            members += p.size() * k;
            groups += k;
        }
        const auto sum = [](const auto& a) { return std::accumulate(a.begin(), a.end(), std::size_t{0}); };
        o.check(sum(counts) == sum(singles) + members, "strategy-level arithmetic identity");
        o.check(passing(cs).size() == sum(singles) + groups, "unique-count arithmetic identity");
    }
    if (o.ok) o.detail = std::to_string(kSnowballCases) + " random iterations";
    return o;
}

// 7 -------------------------------------------------------------------------

Outcome filter_semantics() {
    Outcome o;
    gen::Rng rng(7);
    for (int round = 0; round < kFilterCases && o.ok; ++round) {
        std::vector<PostRecord> posts;
        std::vector<oracle::RawThread> threads;
        PostId next = 1;
        for (int q = gen::uniform(rng, 1, 20); q > 0; --q) {
            oracle::RawThread t;
            std::optional<std::int64_t> asker = gen::uniform(rng, 1, 3);
            if (gen::uniform(rng, 0, 6) == 0) asker.reset();
            t.question = testing::question(next++, asker, gen::uniform(rng, -3, 3));
            for (int a = gen::uniform(rng, 0, 3); a > 0; --a) {
                std::optional<std::int64_t> who = gen::uniform(rng, 1, 3);
                if (gen::uniform(rng, 0, 6) == 0) who.reset();
                t.answers.push_back(testing::answer(next++, t.question.id, who, gen::uniform(rng, -3, 3)));
            }
            posts.push_back(t.question);
            posts.insert(posts.end(), t.answers.begin(), t.answers.end());
            threads.push_back(std::move(t));
        }
        std::shuffle(posts.begin(), posts.end(), rng);
        const auto corpus = Corpus::assemble(posts, {});
        IdSet complete, trusted;
        for (const auto& d : filter_complete(corpus.discussions()).kept) complete.insert(d.id());
        for (const auto& d : filter_trustworthy(corpus.discussions()).kept) trusted.insert(d.id());
        for (const auto& t : threads) {
            o.check(complete.count(t.question.id) == (oracle::has_other_author(t) ? 1u : 0u), "completeness predicate");
            o.check(trusted.count(t.question.id) == (oracle::is_trustworthy(t) ? 1u : 0u), "trust predicate");
        }
    }
    const auto boundary = Corpus::assemble(
        std::vector<PostRecord>{testing::question(1, 1, 0), testing::answer(2, 1, 2, 0), testing::question(3, 5, 4),
                                testing::answer(4, 3, 5, 4), testing::answer(5, 3, 5, 1)},
        {});
    o.check(filter_trustworthy(boundary.discussions()).kept.size() == 2, "score 0 kept");
    const auto kept = filter_complete(boundary.discussions()).kept;
    o.check(kept.size() == 1 && kept[0].id() == 1, "self-answered-only removed");
    if (o.ok) o.detail = std::to_string(kFilterCases) + " random corpora plus boundary cases";
    return o;
}

// 8 -------------------------------------------------------------------------

Outcome consensus_machine() {
    Outcome o;
    using namespace glsb::review;
    const auto schema = LabelSchema::default_schema();
    const IdSet known{1};
    std::size_t sequences = 0;
    for (int n = 1; n <= 3; ++n) {
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<Label> labels;
            int valid = 0;
            for (int i = 0; i < n; ++i) {
                Label l;
                l.discussion_id = 1;
                l.reviewer = std::string(1, static_cast<char>('a' + i));
                if (mask & (1 << i)) {
                    l.verdict = Verdict::Valid;
                    l.codes["Q1"] = {"code"};
                    ++valid;
                } else {
                    l.verdict = Verdict::FalsePositive;
                    l.triggered_rule = "R1";
                }
                labels.push_back(l);
            }
            const int invalid = n - valid;
            std::optional<Verdict> want;
            if (n >= 2 && valid != invalid) {
                if (n == 2) {
                    if (valid == 2) want = Verdict::Valid;
                    if (invalid == 2) want = Verdict::FalsePositive;
                } else {
                    want = valid > invalid ? Verdict::Valid : Verdict::FalsePositive;
                }
            }
            std::vector<int> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), 0);
            std::optional<ConsensusState> first;
            do {
                ReviewLog log(schema);
                std::vector<ConsensusState> states;
                int step = 0;
                for (int i : order)
                    states.push_back(log.submit(labels[static_cast<std::size_t>(i)], known, {},
                                                "2021-03-01T00:00:0" + std::to_string(step++) + "Z"));
                const auto final_state = states.back();
                if (!first) first = final_state;
                o.check(final_state == *first, "outcome depends on order");
                o.check(final_state.verdict == want && final_state.decided() == want.has_value(), "majority outcome");
                const auto replayed = ReviewLog::replay(schema, log.export_log());
                o.check(replayed.export_log() == log.export_log(), "replay bytes differ");
                o.check(json(replayed.consensus(1)).dump() == json(final_state).dump(), "replayed state differs");
                // Every intermediate state is reproduced by replaying the log prefix.
                const auto exported = log.export_log();
                std::size_t pos = 0;
                for (const auto& st : states) {
                    pos = exported.find('\n', pos) + 1;
                    o.check(json(ReviewLog::replay(schema, exported.substr(0, pos)).consensus(1)).dump() == json(st).dump(),
                            "prefix replay differs");
                }
                ++sequences;
            } while (std::next_permutation(order.begin(), order.end()));
        }
    }
    if (o.ok) o.detail = std::to_string(sequences) + " label sequences";
    return o;
}

// 9 -------------------------------------------------------------------------

int run(const std::string& cmd) { return std::system((cmd + " > /dev/null").c_str()); }

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome cli_service_equivalence(const Paths& paths) {
    Outcome o;
    testing::TempDir tmp;
    const auto fixture = paths.fixtures / "replay_counts";
    const auto store = tmp / "store";
    const auto project = tmp / "root" / "replay";
    const auto g = q(paths.glsb);
    const std::vector<std::string> steps{
        g + " ingest --dump " + q(fixture / "dump") + " --store " + q(store),
        g + " import-related --corpus " + q(store) + " --file " + q(fixture / "related.jsonl"),
        g + " init --project " + q(project) + " --corpus " + q(store) + " --id replay",
        g + " startset --project " + q(project),
        g + " label --project " + q(project) + " --file " + q(fixture / "labels_search.jsonl"),
        g + " snowball --project " + q(project),
        g + " label --project " + q(project) + " --file " + q(fixture / "labels_snowball.jsonl"),
        g + " report --project " + q(project) + " --format structured --out " + q(tmp / "cli.jsonl"),
        g + " report --project " + q(project) + " --format table --out " + q(tmp / "cli.md"),
    };
    for (const auto& s : steps) {
        if (run(s) != 0) {
            o.check(false, "command failed: " + s);
            return o;
        }
    }

    Service service(ServiceOptions{tmp / "root", std::nullopt});
    const int port = service.bind_any_port("127.0.0.1");
    std::thread server([&] { service.listen_after_bind(); });
    for (int i = 0; i < 400 && !service.is_running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    httplib::Client client("127.0.0.1", port);
    const auto structured = client.Get("/projects/replay/report?format=structured");
    const auto table = client.Get("/projects/replay/report?format=table");
    service.stop();
    server.join();

    o.check(structured && structured->status == 200, "HTTP structured report failed");
    o.check(table && table->status == 200, "HTTP table report failed");
    if (!o.ok) return o;
    const auto cli_structured = testing::read_file(tmp / "cli.jsonl");
    const auto cli_table = testing::read_file(tmp / "cli.md");
    o.check(!cli_structured.empty() && structured->body == cli_structured, "structured report bytes differ");
    o.check(table->body == cli_table, "table report bytes differ");
    if (o.ok)
        o.detail = std::to_string(cli_structured.size()) + " + " + std::to_string(cli_table.size()) + " bytes identical";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    Paths paths;
    app.add_option("--glsb", paths.glsb, "path to the glsb executable")->required();
    app.add_option("--fixtures", paths.fixtures, "fixtures directory")->required();
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"count replay", [&] { return replay_counts(paths); }},
        {"citation example", [&] { return citation_example(paths); }},
        {"top-cited shape", [&] { return top_cited_shape(paths); }},
        {"similarity oracle", [] { return similarity_oracle(); }},
        {"graph duality", [] { return graph_duality(); }},
        {"snowball hygiene", [] { return snowball_hygiene(); }},
        {"filter semantics", [] { return filter_semantics(); }},
        {"consensus state machine", [] { return consensus_machine(); }},
        {"CLI/service equivalence", [&] { return cli_service_equivalence(paths); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.ok ? 0 : 1;
        std::cout << (o.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
        if (!o.detail.empty()) std::cout << ": " << o.detail;
        std::cout << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
