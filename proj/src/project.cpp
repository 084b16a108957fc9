#include "glsb/project.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "glsb/clock.hpp"
#include "glsb/corpus_store.hpp"
#include "glsb/error.hpp"
#include "glsb/jsonl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace glsb {

namespace {

constexpr const char* kManifest = "project.json";
constexpr const char* kLabels = "labels.jsonl";

std::string_view to_string(IterationKind k) { return k == IterationKind::Search ? "search" : "snowball"; }

std::string_view to_string(CitationMode m) { return m == CitationMode::PerLink ? "per_link" : "per_source"; }

CitationMode citation_mode_from_string(std::string_view text) {
    if (text == "per_link") return CitationMode::PerLink;
    if (text == "per_source") return CitationMode::PerSource;
    throw Error(ErrorCode::InvalidArgument, "unknown citation mode: " + std::string(text));
}

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> read_optional_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

void write_atomically(const fs::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
    }
    fs::rename(tmp, path);
}

json iteration_json(const IterationState& it) {
    json j = {{"index", it.index},
              {"kind", to_string(it.kind)},
              {"started_at", it.started_at},
              {"request_token", optional_string(it.request_token)},
              {"candidate_count", it.candidate_count},
              {"start_ids", it.start_ids}};
    j["filter"] = it.filter ? json(*it.filter) : json(nullptr);
    return j;
}

IterationState iteration_from_json(const json& j) {
    IterationState it;
    it.index = j.at("index").get<int>();
    it.kind = j.at("kind").get<std::string>() == "search" ? IterationKind::Search : IterationKind::Snowball;
    it.started_at = j.value("started_at", "");
    it.request_token = read_optional_string(j, "request_token");
    it.candidate_count = j.value("candidate_count", std::size_t{0});
    it.start_ids = j.value("start_ids", IdSet{});
    if (j.contains("filter") && !j["filter"].is_null()) it.filter = j["filter"].get<FrontierFilter>();
    return it;
}

json search_candidate_json(const SearchCandidate& c) {
    json j = c.match;
    j["passed_filters"] = c.passed_filters;
    j["excluded_reason"] = c.excluded_reason ? json(to_string(*c.excluded_reason)) : json(nullptr);
    return j;
}

SearchCandidate search_candidate_from_json(const json& j) {
    SearchCandidate c;
    c.match.discussion_id = j.at("discussion_id").get<PostId>();
    for (const auto& h : j.at("hits")) {
        auto fields = SearchSpec::parse_fields(h.at("field").get<std::string>());
        c.match.hits.push_back({fields.front(), h.at("id").get<std::int64_t>(), h.at("term").get<std::string>()});
    }
    c.passed_filters = j.at("passed_filters").get<bool>();
    const auto& reason = j.at("excluded_reason");
    if (!reason.is_null()) c.excluded_reason = exclusion_from_string(reason.get<std::string>());
    return c;
}

}  // namespace

void to_json(json& j, const ProjectConfig& c) {
    j = {{"id", c.id},
         {"corpus_dir", c.corpus_dir.string()},
         {"search", c.search},
         {"similarity", c.similarity},
         {"frontier", c.frontier ? json(*c.frontier) : json(nullptr)},
         {"related_origin", to_string(c.related_origin)},
         {"schema", c.schema},
         {"citation_mode", to_string(c.citation_mode)},
         {"top_cited", c.top_cited}};
}

void from_json(const json& j, ProjectConfig& c) {
    c.id = j.at("id").get<std::string>();
    c.corpus_dir = j.at("corpus_dir").get<std::string>();
    if (j.contains("search")) {
        c.search = j["search"].get<SearchSpec>();
    } else {
        c.search = SearchSpec{{"debt", "shortcut"}, SearchSpec::all_fields(), MatchMode::Substring};
    }
    if (j.contains("similarity")) c.similarity = j["similarity"].get<similarity::SimilarityConfig>();
    if (j.contains("frontier") && !j["frontier"].is_null()) c.frontier = j["frontier"].get<FrontierFilter>();
    c.related_origin = edge_origin_from_string(j.value("related_origin", std::string("api")));
    if (j.contains("schema")) c.schema = j["schema"].get<review::LabelSchema>();
    c.citation_mode = citation_mode_from_string(j.value("citation_mode", std::string("per_link")));
    c.top_cited = j.value("top_cited", std::size_t{5});
}

Project Project::create(const fs::path& dir, ProjectConfig config,
                        const std::optional<std::string>& request_token) {
    if (fs::exists(dir / kManifest)) {
        auto existing = open(dir);
        if (request_token && existing.creation_token_ == request_token) return existing;
        throw Error(ErrorCode::Conflict, "project already exists: " + dir.string());
    }
    if (config.id.empty()) throw Error(ErrorCode::InvalidArgument, "project id is required");
    if (config.corpus_dir.empty() || !fs::exists(config.corpus_dir / "manifest.json"))
        throw Error(ErrorCode::NotFound, "missing corpus: " + config.corpus_dir.string());
    config.corpus_dir = fs::absolute(config.corpus_dir).lexically_normal();
    config.search.normalize();
    config.similarity.validate();
    config.schema.validate();
    if (config.frontier) config.frontier->validate();

    Project p;
    p.dir_ = dir;
    p.config_ = std::move(config);
    p.creation_token_ = request_token;
    p.created_at_ = utc_now_iso();
    p.log_ = review::ReviewLog(p.config_.schema, dir / kLabels);
    fs::create_directories(dir / "iterations");
    p.save_manifest();
    return p;
}

Project Project::open(const fs::path& dir) {
    std::ifstream in(dir / kManifest);
    if (!in) throw Error(ErrorCode::NotFound, "no project at " + dir.string());
    const auto manifest = json::parse(in);
    Project p;
    p.dir_ = dir;
    p.config_ = manifest.at("config").get<ProjectConfig>();
    if (p.config_.corpus_dir.is_relative()) p.config_.corpus_dir = dir / p.config_.corpus_dir;
    p.creation_token_ = read_optional_string(manifest, "creation_token");
    p.created_at_ = manifest.value("created_at", "");
    for (const auto& it : manifest.at("iterations")) p.iterations_.push_back(iteration_from_json(it));
    p.load_iterations();
    p.log_ = review::ReviewLog(p.config_.schema, dir / kLabels);
    return p;
}

void Project::save_manifest() const {
    json iterations = json::array();
    for (const auto& it : iterations_) iterations.push_back(iteration_json(it));
    const json manifest = {{"format_version", 1},
                           {"config", config_},
                           {"creation_token", optional_string(creation_token_)},
                           {"created_at", created_at_},
                           {"iterations", iterations}};
    write_atomically(dir_ / kManifest, manifest.dump(2) + "\n");
}

fs::path Project::iteration_file(int index) const {
    char name[32];
    std::snprintf(name, sizeof name, "iteration-%03d.jsonl", index);
    return dir_ / "iterations" / name;
}

void Project::load_iterations() {
    search_.clear();
    snowball_.clear();
    for (const auto& it : iterations_) {
        std::ifstream in(iteration_file(it.index));
        if (!in) throw Error(ErrorCode::Io, "missing iteration file for iteration " + std::to_string(it.index));
        std::string line;
        std::vector<Candidate> snow;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = json::parse(line);
            if (it.kind == IterationKind::Search) {
                search_.push_back(search_candidate_from_json(j));
            } else {
                snow.push_back(j.get<Candidate>());
            }
        }
        if (it.kind == IterationKind::Snowball) snowball_.push_back(std::move(snow));
    }
}

const Workspace& Project::workspace() const {
    if (!workspace_) {
        const auto records = read_corpus_store(config_.corpus_dir);
        auto ws = std::make_shared<Workspace>();
        ws->corpus = Corpus::assemble(records.posts, records.comments);
        std::vector<RelatedEdgeRecord> related;
        std::copy_if(records.related.begin(), records.related.end(), std::back_inserter(related),
                     [&](const RelatedEdgeRecord& e) { return e.origin == config_.related_origin; });
        ws->graph = DiscussionGraph::build(records.postlinks, related, ws->corpus);
        workspace_ = std::move(ws);
    }
    return *workspace_;
}

const IterationState& Project::run_start_set(const std::optional<std::string>& request_token,
                                             const std::string& now) {
    if (!iterations_.empty()) {
        if (request_token && iterations_.front().request_token == request_token) return iterations_.front();
        throw Error(ErrorCode::Conflict, "project already has a start set");
    }
    const auto& corpus = workspace().corpus;
    const auto matches = match(config_.search, corpus.discussions());

    std::vector<SearchCandidate> rows;
    std::size_t passed = 0;
    for (const auto& m : matches) {
        SearchCandidate c{m, true, std::nullopt};
        const auto* d = corpus.find(m.discussion_id);
        if (!d->complete) {
            c.excluded_reason = ExclusionReason::Incomplete;
        } else if (!d->trustworthy) {
            c.excluded_reason = ExclusionReason::Untrustworthy;
        }
        c.passed_filters = !c.excluded_reason;
        passed += c.passed_filters ? 1 : 0;
        rows.push_back(std::move(c));
    }

    IterationState it;
    it.index = 0;
    it.kind = IterationKind::Search;
    it.started_at = now.empty() ? utc_now_iso() : now;
    it.request_token = request_token;
    it.candidate_count = passed;

    std::string body;
    for (const auto& r : rows) body += search_candidate_json(r).dump() + "\n";
    write_atomically(iteration_file(0), body);
    search_ = std::move(rows);
    iterations_.push_back(it);
    save_manifest();
    return iterations_.back();
}

IdSet Project::candidate_ids(int iteration) const {
    IdSet ids;
    if (iteration < 0 || iteration >= static_cast<int>(iterations_.size())) return ids;
    if (iterations_[static_cast<std::size_t>(iteration)].kind == IterationKind::Search) {
        for (const auto& c : search_) {
            if (c.passed_filters) ids.insert(c.match.discussion_id);
        }
    } else {
        for (const auto& c : snowball_candidates(iteration)) {
            if (c.passed_filters) ids.insert(c.id);
        }
    }
    return ids;
}

const std::vector<Candidate>& Project::snowball_candidates(int iteration) const {
    if (iteration < 1 || iteration > static_cast<int>(snowball_.size()))
        throw Error(ErrorCode::NotFound, "no snowball iteration " + std::to_string(iteration));
    return snowball_[static_cast<std::size_t>(iteration - 1)];
}

IdSet Project::valid_set(int iteration) const {
    return review::valid_set(log_, candidate_ids(iteration));
}

IdSet Project::all_valid() const {
    IdSet out;
    for (const auto& it : iterations_) {
        const auto v = valid_set(it.index);
        out.insert(v.begin(), v.end());
    }
    return out;
}

IdSet Project::examined_ids() const {
    IdSet out;
    for (const auto& it : iterations_) {
        const auto ids = candidate_ids(it.index);
        out.insert(ids.begin(), ids.end());
    }
    return out;
}

const IterationState& Project::run_snowball(const std::optional<FrontierFilter>& filter_override,
                                            const std::optional<std::string>& request_token,
                                            const std::string& now) {
    if (request_token) {
        for (const auto& it : iterations_) {
            if (it.request_token == request_token) return it;
        }
    }
    if (iterations_.empty()) throw Error(ErrorCode::Conflict, "run the start set search first");
    const int active = iterations_.back().index;
    const auto open_items = review::undecided(log_, candidate_ids(active));
    if (!open_items.empty()) {
        throw Error(ErrorCode::Conflict, std::to_string(open_items.size()) + " discussions of iteration " +
                                             std::to_string(active) + " are not decided yet");
    }

    StartSet start{config_.id, all_valid(), active + 1};
    if (start.ids.empty()) throw Error(ErrorCode::InvalidArgument, "no valid discussions to snowball from");
    const auto& ws = workspace();
    FrontierFilter filter;
    if (filter_override) {
        filter = *filter_override;
    } else if (config_.frontier) {
        filter = *config_.frontier;
    } else {
        filter = default_frontier_filter(start_set_averages(start, ws.corpus));
    }
    auto examined = examined_ids();
    examined.insert(start.ids.begin(), start.ids.end());
    auto candidates = run_iteration(start, ws.graph, ws.corpus, filter, examined);

    IterationState it;
    it.index = active + 1;
    it.kind = IterationKind::Snowball;
    it.started_at = now.empty() ? utc_now_iso() : now;
    it.request_token = request_token;
    it.filter = filter;
    it.start_ids = start.ids;
    it.candidate_count = passing(candidates).size();

    write_atomically(iteration_file(it.index), to_jsonl(candidates));
    snowball_.push_back(std::move(candidates));
    iterations_.push_back(it);
    save_manifest();
    return iterations_.back();
}

review::ConsensusState Project::submit_label(review::Label label,
                                             const std::optional<std::string>& request_token,
                                             const std::string& now) {
    if (iterations_.empty()) throw Error(ErrorCode::NotFound, "project has no active iteration");
    return log_.submit(std::move(label), candidate_ids(iterations_.back().index), request_token, now);
}

std::vector<PostId> Project::screening_queue(const std::string& reviewer) const {
    if (iterations_.empty()) return {};
    return review::screening_queue(log_, candidate_ids(iterations_.back().index), reviewer);
}

std::string Project::as_of() const {
    std::string latest = created_at_;
    for (const auto& it : iterations_) latest = std::max(latest, it.started_at);
    return std::max(latest, log_.last_recorded_at());
}

metrics::MetricsReport Project::report() const {
    metrics::ReportInputs in;
    in.generated_at = as_of();
    if (!iterations_.empty()) {
        in.search_candidates = candidate_ids(0);
        in.search_valid = valid_set(0);
    }
    IdSet snow_ids;
    for (std::size_t i = 1; i < iterations_.size(); ++i) {
        const auto idx = static_cast<int>(i);
        for (const auto& c : snowball_candidates(idx)) {
            if (!c.passed_filters) continue;
            in.snowball_candidates.push_back(c);
            snow_ids.insert(c.id);
        }
        const auto v = valid_set(idx);
        in.snowball_valid.insert(v.begin(), v.end());
    }
    if (!snow_ids.empty()) {
        in.top_cited = workspace().graph.top_cited(snow_ids, config_.top_cited, config_.citation_mode);
    }
    return metrics::build_report(in);
}

std::string Project::render_report(metrics::ReportFormat format) const {
    return metrics::emit_report(report(), format);
}

json Project::discussion_view(PostId id) const {
    const auto& ws = workspace();
    const auto* d = ws.corpus.find(id);
    if (d == nullptr) throw Error(ErrorCode::NotFound, "unknown discussion " + std::to_string(id));

    auto comments_for = [&](PostId post) {
        auto it = d->comments.find(post);
        return it == d->comments.end() ? json::array() : json(it->second);
    };
    json view;
    view["discussion_id"] = id;
    view["question"] = d->question;
    view["question"]["comments"] = comments_for(id);
    view["answers"] = json::array();
    for (const auto& a : d->answers) {
        json aj = a;
        aj["comments"] = comments_for(a.id);
        aj["accepted"] = d->question.accepted_answer_id == a.id;
        view["answers"].push_back(std::move(aj));
    }
    view["answer_count"] = d->answer_count;
    view["discussion_score"] = d->discussion_score;
    view["complete"] = d->complete;
    view["trustworthy"] = d->trustworthy;

    const std::vector<Discussion> single{*d};
    const auto hits = match(config_.search, single);
    view["hits"] = hits.empty() ? json::array() : json(hits.front())["hits"];

    json links = json::array();
    for (const auto& e : ws.graph.edges()) {
        if (e.source != id && e.target != id) continue;
        links.push_back({{"direction", e.source == id ? "out" : "in"},
                         {"other", e.source == id ? e.target : e.source},
                         {"kind", to_string(e.kind)},
                         {"multiplicity", e.multiplicity},
                         {"external", e.external}});
    }
    view["links"] = links;

    json review;
    review["consensus"] = log_.consensus(id);
    review["labels"] = log_.labels_for(id);
    view["review"] = review;

    for (std::size_t i = 1; i < iterations_.size(); ++i) {
        for (const auto& c : snowball_candidates(static_cast<int>(i))) {
            if (c.id == id) view["candidate"] = {{"iteration", i}, {"record", c}};
        }
    }
    return view;
}

}  // namespace glsb
