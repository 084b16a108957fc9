#include "glsb/related_fetch.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "glsb/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace glsb {

namespace {

std::string today_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

// Throttle responses carry the wait either as a "backoff" field or inside
// the error message ("more requests available in 12 seconds").
std::chrono::seconds throttle_delay(const json& body, const httplib::Result& res) {
    if (body.contains("backoff")) return std::chrono::seconds(body["backoff"].get<int>());
    if (body.contains("error_message")) {
        static const std::regex kSeconds(R"(available in (\d+) seconds)");
        std::smatch m;
        const auto msg = body["error_message"].get<std::string>();
        if (std::regex_search(msg, m, kSeconds)) return std::chrono::seconds(std::stoi(m[1]));
    }
    if (res && res->has_header("Retry-After")) {
        return std::chrono::seconds(std::stoi(res->get_header_value("Retry-After")));
    }
    return std::chrono::seconds(1);
}

}  // namespace

std::vector<RelatedEdgeRecord> parse_related_response(PostId source, const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, "related response is not JSON: " + std::string(e.what()));
    }
    std::vector<RelatedEdgeRecord> edges;
    int rank = 0;
    for (const auto& item : doc.value("items", json::array())) {
        const auto target = item.at("question_id").get<PostId>();
        if (target == source) continue;
        const bool seen = std::any_of(edges.begin(), edges.end(), [&](const auto& e) {
            return e.target_question_id == target;
        });
        if (seen) continue;
        edges.push_back({source, target, ++rank, EdgeOrigin::Api});
    }
    return edges;
}

RelatedFetcher::RelatedFetcher(FetchOptions options)
    : options_(std::move(options)),
      sleeper_([](std::chrono::seconds s) { std::this_thread::sleep_for(s); }) {
    if (options_.page_size < 1) throw Error(ErrorCode::InvalidArgument, "page_size must be >= 1");
}

std::optional<std::string> RelatedFetcher::cached_body(PostId id) const {
    if (options_.cache_dir.empty()) return std::nullopt;
    const auto dir = options_.cache_dir / options_.site / std::to_string(id);
    if (!fs::exists(dir)) return std::nullopt;
    fs::path chosen;
    if (!options_.fetch_date.empty()) {
        chosen = dir / (options_.fetch_date + ".json");
        if (!fs::exists(chosen)) return std::nullopt;
    } else {
        std::vector<fs::path> snapshots;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".json") snapshots.push_back(entry.path());
        }
        if (snapshots.empty()) return std::nullopt;
        std::sort(snapshots.begin(), snapshots.end());
        chosen = snapshots.back();
    }
    std::ifstream in(chosen, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void RelatedFetcher::write_cache(PostId id, const std::string& body) const {
    if (options_.cache_dir.empty()) return;
    const auto dir = options_.cache_dir / options_.site / std::to_string(id);
    fs::create_directories(dir);
    const auto date = options_.fetch_date.empty() ? today_utc() : options_.fetch_date;
    std::ofstream out(dir / (date + ".json"), std::ios::binary | std::ios::trunc);
    out << body;
}

std::optional<std::string> RelatedFetcher::fetch_remote(PostId id) {
    httplib::Client client(options_.base_url);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);

    std::string path = "/2.3/questions/" + std::to_string(id) +
                       "/related?site=" + httplib::detail::encode_query_param(options_.site) +
                       "&pagesize=" + std::to_string(options_.page_size);
    if (options_.api_key) path += "&key=" + httplib::detail::encode_query_param(*options_.api_key);

    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        if (pending_backoff_.count() > 0) {
            sleeper_(pending_backoff_);
            pending_backoff_ = std::chrono::seconds(0);
        }
        ++requests_;
        auto res = client.Get(path);
        if (!res) {
            spdlog::warn("related fetch for {} failed: {}", id, httplib::to_string(res.error()));
            continue;
        }
        json body = json::parse(res->body, nullptr, false);
        const bool throttled =
            res->status == 429 ||
            (!body.is_discarded() && body.value("error_id", 0) == 502);
        if (throttled) {
            pending_backoff_ = throttle_delay(body.is_discarded() ? json::object() : body, res);
            spdlog::info("throttled on {}, backing off {}s", id, pending_backoff_.count());
            continue;
        }
        if (res->status != 200 || body.is_discarded()) {
            spdlog::warn("related fetch for {} returned HTTP {}", id, res->status);
            continue;
        }
        // A successful response may still ask us to wait before the next call.
        if (body.contains("backoff")) pending_backoff_ = std::chrono::seconds(body["backoff"].get<int>());
        return res->body;
    }
    return std::nullopt;
}

std::vector<RelatedEdgeRecord> RelatedFetcher::fetch(const std::vector<PostId>& question_ids) {
    if (question_ids.empty()) throw Error(ErrorCode::InvalidArgument, "no ids supplied");
    std::vector<RelatedEdgeRecord> edges;
    std::vector<PostId> unfetched;
    FetchProgress progress{0, question_ids.size(), 0, false};
    for (const auto id : question_ids) {
        progress.question_id = id;
        auto body = cached_body(id);
        progress.from_cache = body.has_value();
        if (!body) {
            body = fetch_remote(id);
            if (body) write_cache(id, *body);
        }
        if (body) {
            auto part = parse_related_response(id, *body);
            edges.insert(edges.end(), part.begin(), part.end());
        } else {
            unfetched.push_back(id);
        }
        ++progress.done;
        if (progress_) progress_(progress);
    }
    if (!unfetched.empty()) {
        std::string ids;
        for (const auto id : unfetched) ids += (ids.empty() ? "" : ",") + std::to_string(id);
        throw Error(ErrorCode::Network, "related fetch failed after retries for ids: " + ids);
    }
    return edges;
}

}  // namespace glsb
