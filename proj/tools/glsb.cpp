// glsb: command-line front end for corpus ingestion, snowballing projects and reports.
#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "glsb/corpus_store.hpp"
#include "glsb/error.hpp"
#include "glsb/jsonl.hpp"
#include "glsb/project.hpp"
#include "glsb/related_fetch.hpp"
#include "glsb/service.hpp"
#include "glsb/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glsb;

namespace {

/// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << content;
}

Corpus load_corpus(const fs::path& store) {
    const auto records = read_corpus_store(store);
    return Corpus::assemble(records.posts, records.comments);
}

std::set<EdgeKind> parse_apply_to(const std::string& spec) {
    std::set<EdgeKind> kinds;
    if (spec == "none") return kinds;
    for (const auto& part : text::split(spec, ',')) {
        if (part == "linked") kinds.insert(EdgeKind::Linked);
        else if (part == "related") kinds.insert(EdgeKind::Related);
        else if (part == "all") kinds = {EdgeKind::Linked, EdgeKind::Related};
        else throw Error(ErrorCode::InvalidArgument, "unknown edge kind: " + part);
    }
    return kinds;
}

std::optional<std::string> opt_token(const std::string& token) {
    return token.empty() ? std::nullopt : std::optional<std::string>(token);
}

struct FilterFlags {
    std::optional<int> min_answers;
    std::optional<int> min_score;
    std::string apply_to = "related";

    void add(CLI::App* cmd) {
        cmd->add_option("--min-answers", min_answers, "minimum answer count for thresholded strategies");
        cmd->add_option("--min-score", min_score, "minimum question score for thresholded strategies");
        cmd->add_option("--apply-to", apply_to, "edge kinds the thresholds apply to: related, linked, all, none");
    }

    std::optional<FrontierFilter> filter() const {
        if (!min_answers && !min_score) return std::nullopt;
        FrontierFilter f;
        f.min_answers = min_answers.value_or(0);
        f.min_score = min_score.value_or(0);
        f.apply_to = parse_apply_to(apply_to);
        f.validate();
        return f;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gray-literature snowballing toolkit"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "debug logging");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse a data dump into a corpus store");
    std::string dump_dir, store_dir;
    ingest->add_option("--dump", dump_dir, "directory with Posts.xml, Comments.xml, PostLinks.xml")->required();
    ingest->add_option("--store,--corpus", store_dir, "corpus store directory")->required();

    // fetch-related
    auto* fetch = app.add_subcommand("fetch-related", "fetch related-question lists into the store");
    FetchOptions fetch_opts;
    std::string fetch_store, fetch_ids;
    fetch->add_option("--corpus", fetch_store, "corpus store directory")->required();
    fetch->add_option("--ids", fetch_ids, "comma-separated question ids; default all questions");
    fetch->add_option("--cache", fetch_opts.cache_dir, "response cache directory")->required();
    fetch->add_option("--date", fetch_opts.fetch_date, "snapshot date used as cache key");
    fetch->add_option("--site", fetch_opts.site, "site parameter")->capture_default_str();
    fetch->add_option("--base-url", fetch_opts.base_url, "API base URL")->capture_default_str();
    fetch->add_option("--max-retries", fetch_opts.max_retries, "retries on throttling")->capture_default_str();
    std::string api_key;
    fetch->add_option("--key", api_key, "API key")->envname("GLSB_API_KEY");

    // import-related
    auto* import_related = app.add_subcommand("import-related", "replace the store's related edges from a JSONL file");
    std::string import_store, import_file;
    import_related->add_option("--corpus", import_store, "corpus store directory")->required();
    import_related->add_option("--file", import_file, "edge file: source, target, rank, origin per line")->required();

    // search
    auto* search = app.add_subcommand("search", "string search over a corpus store");
    std::string search_store, search_terms, search_fields = "all", search_mode = "substring", search_out;
    search->add_option("--corpus", search_store, "corpus store directory")->required();
    search->add_option("--terms", search_terms, "comma-separated search terms")->required();
    search->add_option("--fields", search_fields, "all or comma-separated field names")->capture_default_str();
    search->add_option("--mode", search_mode, "substring or token")->capture_default_str();
    search->add_option("--out", search_out, "output JSONL file");

    // related
    auto* related = app.add_subcommand("related", "generate local related edges by weighted similarity");
    related->set_config("--config", "", "similarity settings file (key = value)");
    similarity::SimilarityConfig sim;
    std::string related_store, related_out;
    bool related_store_write = false, question_only = false;
    related->add_option("--corpus", related_store, "corpus store directory")->required();
    related->add_option("--out", related_out, "output JSONL edge file");
    related->add_flag("--store-edges", related_store_write, "also replace the related edges in the store");
    related->add_option("--weight-tags,--weight_tags", sim.weight_tags)->capture_default_str();
    related->add_option("--weight-title,--weight_title", sim.weight_title)->capture_default_str();
    related->add_option("--weight-body,--weight_body", sim.weight_body)->capture_default_str();
    related->add_option("--max-query-terms,--max_query_terms", sim.max_query_terms)->capture_default_str();
    related->add_option("--top-k,--top_k", sim.top_k)->capture_default_str();
    related->add_option("--min-token-len,--min_token_len", sim.min_token_len)->capture_default_str();
    related->add_flag("--stemming", sim.stemming);
    related->add_flag("--question-body-only,--question_body_only", question_only);

    // graph
    auto* graph = app.add_subcommand("graph", "export the discussion graph as an edge list");
    std::string graph_store, graph_out, graph_origin = "api";
    graph->add_option("--corpus", graph_store, "corpus store directory")->required();
    graph->add_option("--origin", graph_origin, "related edge origin: api or local")->capture_default_str();
    graph->add_option("--out", graph_out, "output TSV file");

    // project init
    auto* init = app.add_subcommand("init", "create a project directory");
    std::string project_dir, init_store, init_id, init_terms = "debt,shortcut", init_fields = "all",
                                                  init_mode = "substring", init_origin = "api", init_token;
    std::string citation = "per_link";
    FilterFlags init_filter;
    init->add_option("--project", project_dir, "project directory")->required();
    init->add_option("--corpus", init_store, "corpus store directory")->required();
    init->add_option("--id", init_id, "project id; default the directory name");
    init->add_option("--terms", init_terms)->capture_default_str();
    init->add_option("--fields", init_fields)->capture_default_str();
    init->add_option("--mode", init_mode)->capture_default_str();
    init->add_option("--origin", init_origin, "related edge origin: api or local")->capture_default_str();
    init->add_option("--citation", citation, "per_link or per_source")->capture_default_str();
    init->add_option("--token", init_token, "request token");
    init_filter.add(init);

    // startset
    auto* startset = app.add_subcommand("startset", "run the start-set search of a project");
    std::string start_out, start_token;
    startset->add_option("--project", project_dir, "project directory")->required();
    startset->add_option("--out", start_out, "write the passing matches as JSONL");
    startset->add_option("--token", start_token, "request token");

    // snowball
    auto* snowball = app.add_subcommand("snowball", "run the next snowballing iteration");
    std::string snow_out, snow_token;
    FilterFlags snow_filter;
    snowball->add_option("--project", project_dir, "project directory")->required();
    snowball->add_option("--out", snow_out, "write all candidates as JSONL");
    snowball->add_option("--token", snow_token, "request token");
    snow_filter.add(snowball);

    // label
    auto* label = app.add_subcommand("label", "submit labels from a JSONL file");
    std::string label_file;
    label->add_option("--project", project_dir, "project directory")->required();
    label->add_option("--file", label_file, "one label per line; optional request_token field")->required();

    // queue
    auto* queue = app.add_subcommand("queue", "show the screening queue of a reviewer");
    std::string reviewer;
    queue->add_option("--project", project_dir, "project directory")->required();
    queue->add_option("--reviewer", reviewer)->required();

    // report
    auto* report = app.add_subcommand("report", "metrics report of a project");
    std::string report_format = "structured", report_out;
    report->add_option("--project", project_dir, "project directory")->required();
    report->add_option("--format", report_format, "structured or table")->capture_default_str();
    report->add_option("--out", report_out, "output file");

    // serve
    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    std::string host = "127.0.0.1", root, ui_dir;
    int port = 8080;
    serve->add_option("--host", host)->envname("GLSB_HOST")->capture_default_str();
    serve->add_option("--port", port)->envname("GLSB_PORT")->capture_default_str();
    serve->add_option("--root", root, "project root directory")->envname("GLSB_PROJECT_ROOT")->required();
    serve->add_option("--ui", ui_dir, "built UI assets")->envname("GLSB_UI_DIR");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
    spdlog::set_default_logger(spdlog::default_logger());

    try {
        if (*ingest) {
            const auto summary = ingest_dump(dump_dir, store_dir);
            json out = {{"posts", summary.posts}, {"comments", summary.comments}, {"postlinks", summary.postlinks}};
            for (const auto& s : summary.sources)
                out["sources"][s.file] = {{"rows", s.report.total_rows},
                                          {"parsed", s.report.parsed},
                                          {"skipped", s.report.skipped()}};
            std::cout << out.dump(2) << "\n";
        } else if (*fetch) {
            if (!api_key.empty()) fetch_opts.api_key = api_key;
            std::vector<PostId> ids;
            if (!fetch_ids.empty()) {
                for (const auto& part : text::split(fetch_ids, ',')) ids.push_back(std::stoll(part));
            } else {
                for (const auto& d : load_corpus(fetch_store).discussions()) ids.push_back(d.id());
            }
            RelatedFetcher fetcher(fetch_opts);
            fetcher.set_progress([](const FetchProgress& p) {
                spdlog::info("{}/{} question {}{}", p.done, p.total, p.question_id, p.from_cache ? " (cached)" : "");
            });
            auto edges = fetcher.fetch(ids);
            store_related_edges(fetch_store, edges);
            std::cout << edges.size() << " related edges from " << fetcher.requests_issued() << " requests\n";
        } else if (*import_related) {
            const auto edges = read_jsonl<RelatedEdgeRecord>(import_file);
            store_related_edges(import_store, edges);
            std::cout << edges.size() << " related edges stored\n";
        } else if (*search) {
            SearchSpec spec;
            spec.terms = text::split(search_terms, ',');
            spec.fields = SearchSpec::parse_fields(search_fields);
            spec.mode = search_mode == "token" ? MatchMode::Token : MatchMode::Substring;
            if (search_mode != "token" && search_mode != "substring")
                throw Error(ErrorCode::InvalidArgument, "unknown mode: " + search_mode);
            const auto corpus = load_corpus(search_store);
            emit(search_out, to_jsonl(match(spec, corpus.discussions())));
        } else if (*related) {
            sim.body_includes_answers = !question_only;
            sim.validate();
            const auto corpus = load_corpus(related_store);
            const auto index = similarity::Index::build(corpus.discussions(), sim);
            const auto edges = similarity::generate_related_edges(index, sim);
            if (related_store_write) store_related_edges(related_store, edges);
            emit(related_out, to_jsonl(edges));
        } else if (*graph) {
            const auto records = read_corpus_store(graph_store);
            const auto corpus = Corpus::assemble(records.posts, records.comments);
            const auto origin = edge_origin_from_string(graph_origin);
            std::vector<RelatedEdgeRecord> related_edges;
            for (const auto& e : records.related)
                if (e.origin == origin) related_edges.push_back(e);
            const auto g = DiscussionGraph::build(records.postlinks, related_edges, corpus);
            std::ostringstream out;
            g.write_edge_list(out);
            emit(graph_out, out.str());
        } else if (*init) {
            ProjectConfig config;
            config.id = init_id.empty() ? fs::path(project_dir).filename().string() : init_id;
            config.corpus_dir = init_store;
            config.search.terms = text::split(init_terms, ',');
            config.search.fields = SearchSpec::parse_fields(init_fields);
            config.search.mode = init_mode == "token" ? MatchMode::Token : MatchMode::Substring;
            config.related_origin = edge_origin_from_string(init_origin);
            config.citation_mode = citation == "per_source" ? CitationMode::PerSource : CitationMode::PerLink;
            config.frontier = init_filter.filter();
            const auto p = Project::create(project_dir, std::move(config), opt_token(init_token));
            std::cout << "project " << p.config().id << " at " << p.dir().string() << "\n";
        } else if (*startset) {
            auto p = Project::open(project_dir);
            const auto& state = p.run_start_set(opt_token(start_token));
            if (!start_out.empty()) {
                std::string body;
                for (const auto& c : p.search_candidates())
                    if (c.passed_filters) body += json(c.match).dump() + "\n";
                emit(start_out, body);
            }
            std::cout << "iteration " << state.index << ": " << state.candidate_count << " candidates\n";
        } else if (*snowball) {
            auto p = Project::open(project_dir);
            const auto& state = p.run_snowball(snow_filter.filter(), opt_token(snow_token));
            if (!snow_out.empty()) emit(snow_out, to_jsonl(p.snowball_candidates(state.index)));
            std::cout << "iteration " << state.index << ": " << state.candidate_count << " candidates (min_answers "
                      << state.filter->min_answers << ", min_score " << state.filter->min_score << ")\n";
        } else if (*label) {
            auto p = Project::open(project_dir);
            std::ifstream in(label_file);
            if (!in) throw Error(ErrorCode::NotFound, "cannot read " + label_file);
            std::string line;
            std::size_t submitted = 0;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                auto j = json::parse(line);
                std::optional<std::string> token;
                if (j.contains("request_token")) {
                    token = j["request_token"].get<std::string>();
                    j.erase("request_token");
                }
                p.submit_label(j.get<review::Label>(), token, j.value("created_at", ""));
                ++submitted;
            }
            std::cout << submitted << " labels submitted\n";
        } else if (*queue) {
            const auto p = Project::open(project_dir);
            for (auto id : p.screening_queue(reviewer)) std::cout << id << "\n";
        } else if (*report) {
            const auto p = Project::open(project_dir);
            emit(report_out, p.render_report(metrics::report_format_from_string(report_format)));
        } else if (*serve) {
            ServiceOptions options{root, std::nullopt};
            if (!ui_dir.empty()) options.ui_dir = ui_dir;
            Service service(options);
            spdlog::set_level(spdlog::level::info);
            spdlog::info("listening on {}:{} with project root {}", host, port, root);
            if (!service.listen(host, port)) throw Error(ErrorCode::Io, "cannot listen on " + host);
        }
    } catch (const review::LabelRejected& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& fe : e.errors()) std::cerr << "  " << fe.field << ": " << fe.message << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
