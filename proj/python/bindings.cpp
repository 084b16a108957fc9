#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "glsb/corpus_store.hpp"
#include "glsb/error.hpp"
#include "glsb/jsonl.hpp"
#include "glsb/metrics.hpp"
#include "glsb/project.hpp"
#include "glsb/similarity.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Structured values cross the boundary as JSON text; the Python package decodes them.

glsb::Corpus load_corpus(const std::filesystem::path& store) {
    const auto records = glsb::read_corpus_store(store);
    return glsb::Corpus::assemble(records.posts, records.comments);
}

std::string search(const std::filesystem::path& store, const std::vector<std::string>& terms,
                   const std::string& fields, const std::string& mode) {
    glsb::SearchSpec spec{terms, glsb::SearchSpec::parse_fields(fields),
                          mode == "token" ? glsb::MatchMode::Token : glsb::MatchMode::Substring};
    const auto corpus = load_corpus(store);
    return json(glsb::match(spec, corpus.discussions())).dump();
}

std::vector<std::pair<glsb::PostId, double>> more_like_this(const std::filesystem::path& store,
                                                            glsb::PostId source,
                                                            const std::string& config_json) {
    auto config = config_json.empty() ? glsb::similarity::SimilarityConfig{}
                                      : json::parse(config_json).get<glsb::similarity::SimilarityConfig>();
    config.validate();
    const auto corpus = load_corpus(store);
    const auto index = glsb::similarity::Index::build(corpus.discussions(), config);
    std::vector<std::pair<glsb::PostId, double>> out;
    for (const auto& d : glsb::similarity::more_like_this(source, index, config)) out.emplace_back(d.id, d.score);
    return out;
}

std::optional<std::pair<std::int64_t, std::int64_t>> precision(std::int64_t candidates, std::int64_t valid) {
    const auto p = glsb::metrics::precision(candidates, valid);
    if (!p) return std::nullopt;
    return std::make_pair(p->num(), p->den());
}

std::optional<std::string> token_arg(const std::string& token) {
    return token.empty() ? std::nullopt : std::optional<std::string>(token);
}

}  // namespace

PYBIND11_MODULE(_glsb, m) {
    m.doc() = "snowballing toolkit core";

    static py::exception<glsb::Error> error(m, "GlsbError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const glsb::Error& e) {
            PyErr_SetString(error.ptr(), (std::string(glsb::to_string(e.code())) + ": " + e.what()).c_str());
        }
    });

    m.def("ingest_dump", [](const std::filesystem::path& dump, const std::filesystem::path& store) {
        const auto s = glsb::ingest_dump(dump, store);
        return json({{"posts", s.posts}, {"comments", s.comments}, {"postlinks", s.postlinks}}).dump();
    }, py::arg("dump_dir"), py::arg("store_dir"));
    m.def("import_related", [](const std::filesystem::path& store, const std::filesystem::path& file) {
        const auto edges = glsb::read_jsonl<glsb::RelatedEdgeRecord>(file);
        glsb::store_related_edges(store, edges);
        return edges.size();
    }, py::arg("store_dir"), py::arg("edge_file"));
    m.def("search", &search, py::arg("store_dir"), py::arg("terms"), py::arg("fields") = "all",
          py::arg("mode") = "substring");
    m.def("more_like_this", &more_like_this, py::arg("store_dir"), py::arg("source"),
          py::arg("config_json") = "");
    m.def("precision", &precision, py::arg("candidates"), py::arg("valid"));

    py::class_<glsb::Project>(m, "Project")
        .def_static("create", [](const std::filesystem::path& dir, const std::string& config_json,
                                 const std::string& token) {
            return glsb::Project::create(dir, json::parse(config_json).get<glsb::ProjectConfig>(), token_arg(token));
        }, py::arg("dir"), py::arg("config_json"), py::arg("token") = "")
        .def_static("open", &glsb::Project::open, py::arg("dir"))
        .def_property_readonly("id", [](const glsb::Project& p) { return p.config().id; })
        .def_property_readonly("iteration_count", [](const glsb::Project& p) { return p.iterations().size(); })
        .def("run_start_set", [](glsb::Project& p, const std::string& token) {
            return p.run_start_set(token_arg(token)).candidate_count;
        }, py::arg("token") = "")
        .def("run_snowball", [](glsb::Project& p, const std::string& filter_json, const std::string& token) {
            std::optional<glsb::FrontierFilter> filter;
            if (!filter_json.empty()) filter = json::parse(filter_json).get<glsb::FrontierFilter>();
            return p.run_snowball(filter, token_arg(token)).candidate_count;
        }, py::arg("filter_json") = "", py::arg("token") = "")
        .def("submit_label", [](glsb::Project& p, const std::string& label_json, const std::string& token) {
            return json(p.submit_label(json::parse(label_json).get<glsb::review::Label>(), token_arg(token))).dump();
        }, py::arg("label_json"), py::arg("token") = "")
        .def("screening_queue", &glsb::Project::screening_queue, py::arg("reviewer"))
        .def("candidate_ids", &glsb::Project::candidate_ids, py::arg("iteration"))
        .def("discussion", [](const glsb::Project& p, glsb::PostId id) { return p.discussion_view(id).dump(); })
        .def("report", [](const glsb::Project& p, const std::string& format) {
            return p.render_report(glsb::metrics::report_format_from_string(format));
        }, py::arg("format") = "structured");
}
