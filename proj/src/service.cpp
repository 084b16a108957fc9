#include "glsb/service.hpp"

#include <spdlog/spdlog.h>

#include <regex>

#include "glsb/clock.hpp"
#include "glsb/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace glsb {

namespace {

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::ParseError: return 400;
        case ErrorCode::NotFound: return 404;
        case ErrorCode::Conflict: return 409;
        case ErrorCode::SchemaViolation: return 422;
        case ErrorCode::Network: return 502;
        case ErrorCode::Io: return 500;
    }
    return 500;
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message,
                const json& fields = json::array()) {
    send_json(res, status_for(code),
              {{"error", {{"code", to_string(code)}, {"message", message}, {"fields", fields}}}});
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        auto j = json::parse(req.body);
        if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("invalid JSON body: ") + e.what());
    }
}

/// Token from the Idempotency-Key header or the body's request_token.
std::optional<std::string> request_token(const httplib::Request& req, const json& body) {
    if (req.has_header("Idempotency-Key")) return req.get_header_value("Idempotency-Key");
    if (auto it = body.find("request_token"); it != body.end() && it->is_string()) return it->get<std::string>();
    return std::nullopt;
}

/// Runs a handler and maps failures onto JSON error responses.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const review::LabelRejected& e) {
            json fields = json::array();
            for (const auto& fe : e.errors()) fields.push_back({{"field", fe.field}, {"message", fe.message}});
            send_error(res, e.code(), e.what(), fields);
        } catch (const Error& e) {
            send_error(res, e.code(), e.what());
        } catch (const json::exception& e) {
            send_error(res, ErrorCode::InvalidArgument, e.what());
        } catch (const std::exception& e) {
            spdlog::error("{} {}: {}", req.method, req.path, e.what());
            send_error(res, ErrorCode::Io, e.what());
        }
    };
}

const std::regex kProjectId("[A-Za-z0-9_.-]+");

}  // namespace

std::shared_ptr<const Project> Service::Handle::current() {
    std::lock_guard lock(snapshot_mutex);
    return snapshot;
}

void Service::Handle::publish(Project next) {
    auto ptr = std::make_shared<const Project>(std::move(next));
    std::lock_guard lock(snapshot_mutex);
    snapshot = std::move(ptr);
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {
    fs::create_directories(options_.project_root);
    routes();
    if (options_.ui_dir && fs::is_directory(*options_.ui_dir)) {
        server_.set_mount_point("/", options_.ui_dir->string());
    }
}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return server_.listen(host, port); }
int Service::bind_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
bool Service::listen_after_bind() { return server_.listen_after_bind(); }
void Service::stop() {
    if (server_.is_running()) server_.stop();
}
bool Service::is_running() const { return server_.is_running(); }

fs::path Service::project_dir(const std::string& id) const { return options_.project_root / id; }

std::shared_ptr<Service::Handle> Service::handle(const std::string& id, bool must_exist) {
    if (!std::regex_match(id, kProjectId) || id == "." || id == "..")
        throw Error(ErrorCode::InvalidArgument, "project id must match [A-Za-z0-9_.-]+ and not be a dot path");
    std::lock_guard lock(handles_mutex_);
    if (auto it = handles_.find(id); it != handles_.end()) {
        if (must_exist && it->second->current() == nullptr)
            throw Error(ErrorCode::NotFound, "unknown project " + id);
        return it->second;
    }
    auto h = std::make_shared<Handle>();
    const auto dir = project_dir(id);
    if (fs::exists(dir / "project.json")) {
        h->snapshot = std::make_shared<const Project>(Project::open(dir));
    } else if (must_exist) {
        throw Error(ErrorCode::NotFound, "unknown project " + id);
    }
    handles_.emplace(id, h);
    return h;
}

void Service::routes() {
    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}});
    });

    server_.Post("/projects", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        const auto token = request_token(req, body);
        auto config = body.get<ProjectConfig>();
        auto h = handle(config.id, false);
        std::lock_guard lock(h->writer);
        const bool existed = h->current() != nullptr;
        const auto dir = project_dir(config.id);
        auto project = Project::create(dir, std::move(config), token);
        json out = {{"id", project.config().id}, {"config", project.config()}};
        h->publish(std::move(project));
        send_json(res, existed ? 200 : 201, out);
    }));

    server_.Post(R"(/projects/([^/]+)/startset)",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                     const auto body = parse_body(req);
                     auto h = handle(req.matches[1]);
                     std::lock_guard lock(h->writer);
                     Project next = *h->current();
                     const auto state = next.run_start_set(request_token(req, body));
                     json out = {{"iteration", state.index}, {"candidates", state.candidate_count},
                                 {"started_at", state.started_at}};
                     h->publish(std::move(next));
                     send_json(res, 200, out);
                 }));

    server_.Post(R"(/projects/([^/]+)/iterations)",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                     const auto body = parse_body(req);
                     std::optional<FrontierFilter> filter;
                     if (auto it = body.find("filter"); it != body.end() && !it->is_null())
                         filter = it->get<FrontierFilter>();
                     auto h = handle(req.matches[1]);
                     std::lock_guard lock(h->writer);
                     Project next = *h->current();
                     const auto state = next.run_snowball(filter, request_token(req, body));
                     json out = {{"iteration", state.index}, {"candidates", state.candidate_count},
                                 {"started_at", state.started_at}, {"filter", *state.filter}};
                     h->publish(std::move(next));
                     send_json(res, 200, out);
                 }));

    server_.Get(R"(/projects/([^/]+)/queue)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto reviewer = req.get_param_value("reviewer");
                    if (reviewer.empty()) throw Error(ErrorCode::InvalidArgument, "reviewer is required");
                    const auto project = handle(req.matches[1])->current();
                    send_json(res, 200, {{"reviewer", reviewer}, {"queue", project->screening_queue(reviewer)}});
                }));

    server_.Get(R"(/projects/([^/]+)/discussions/(\d+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto project = handle(req.matches[1])->current();
                    send_json(res, 200, project->discussion_view(std::stoll(req.matches[2])));
                }));

    server_.Post(R"(/projects/([^/]+)/labels)",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                     const auto body = parse_body(req);
                     const auto token = request_token(req, body);
                     auto label_json = body.contains("label") ? body["label"] : body;
                     label_json.erase("request_token");
                     review::Label label;
                     try {
                         label = label_json.get<review::Label>();
                     } catch (const json::exception& e) {
                         throw review::LabelRejected(std::vector<review::FieldError>{{"label", e.what()}});
                     } catch (const Error& e) {
                         throw review::LabelRejected(std::vector<review::FieldError>{{"label", e.what()}});
                     }
                     auto h = handle(req.matches[1]);
                     std::lock_guard lock(h->writer);
                     Project next = *h->current();
                     const auto state = next.submit_label(std::move(label), token);
                     h->publish(std::move(next));
                     send_json(res, 200, {{"consensus", state}});
                 }));

    server_.Get(R"(/projects/([^/]+)/report)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto project = handle(req.matches[1])->current();
                    const auto format = metrics::report_format_from_string(
                        req.has_param("format") ? req.get_param_value("format") : "structured");
                    res.status = 200;
                    res.set_content(project->render_report(format),
                                    format == metrics::ReportFormat::Table ? "text/markdown; charset=utf-8"
                                                                           : "application/x-ndjson");
                }));
}

}  // namespace glsb
