#include "glsb/records.hpp"

#include "glsb/error.hpp"

namespace glsb {

using nlohmann::json;

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::NotFound: return "not_found";
        case ErrorCode::ParseError: return "parse_error";
        case ErrorCode::SchemaViolation: return "schema_violation";
        case ErrorCode::Conflict: return "conflict";
        case ErrorCode::Network: return "network";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

std::string_view to_string(PostKind kind) {
    return kind == PostKind::Question ? "question" : "answer";
}

std::string_view to_string(LinkKind kind) {
    return kind == LinkKind::Linked ? "linked" : "duplicate";
}

std::string_view to_string(EdgeOrigin origin) {
    return origin == EdgeOrigin::Api ? "api" : "local";
}

EdgeOrigin edge_origin_from_string(std::string_view text) {
    if (text == "api") return EdgeOrigin::Api;
    if (text == "local") return EdgeOrigin::Local;
    throw Error(ErrorCode::InvalidArgument, "unknown edge origin: " + std::string(text));
}

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& value) {
    j[key] = value ? json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

}  // namespace

void to_json(json& j, const PostRecord& r) {
    j = json::object();
    j["id"] = r.id;
    j["post_kind"] = to_string(r.kind);
    put_optional(j, "parent_id", r.parent_id);
    j["title"] = r.title;
    j["body"] = r.body;
    j["tags"] = r.tags;
    j["score"] = r.score;
    put_optional(j, "owner_id", r.owner_id);
    put_optional(j, "accepted_answer_id", r.accepted_answer_id);
    j["created_at"] = r.created_at;
}

void from_json(const json& j, PostRecord& r) {
    r.id = j.at("id").get<PostId>();
    const auto kind = j.at("post_kind").get<std::string>();
    if (kind == "question") {
        r.kind = PostKind::Question;
    } else if (kind == "answer") {
        r.kind = PostKind::Answer;
    } else {
        throw Error(ErrorCode::ParseError, "unknown post_kind: " + kind);
    }
    r.parent_id = get_optional<PostId>(j, "parent_id");
    r.title = j.value("title", "");
    r.body = j.value("body", "");
    r.tags = j.value("tags", std::vector<std::string>{});
    r.score = j.value("score", std::int64_t{0});
    r.owner_id = get_optional<UserId>(j, "owner_id");
    r.accepted_answer_id = get_optional<PostId>(j, "accepted_answer_id");
    r.created_at = j.value("created_at", "");
}

void to_json(json& j, const CommentRecord& r) {
    j = json::object();
    j["id"] = r.id;
    j["post_id"] = r.post_id;
    j["body"] = r.body;
    j["score"] = r.score;
    put_optional(j, "author_id", r.author_id);
}

void from_json(const json& j, CommentRecord& r) {
    r.id = j.at("id").get<std::int64_t>();
    r.post_id = j.at("post_id").get<PostId>();
    r.body = j.value("body", "");
    r.score = j.value("score", std::int64_t{0});
    r.author_id = get_optional<UserId>(j, "author_id");
}

void to_json(json& j, const PostLinkRecord& r) {
    j = json::object();
    j["id"] = r.id;
    j["source_post_id"] = r.source_post_id;
    j["target_post_id"] = r.target_post_id;
    j["link_kind"] = to_string(r.kind);
    j["created_at"] = r.created_at;
}

void from_json(const json& j, PostLinkRecord& r) {
    r.id = j.at("id").get<std::int64_t>();
    r.source_post_id = j.at("source_post_id").get<PostId>();
    r.target_post_id = j.at("target_post_id").get<PostId>();
    const auto kind = j.at("link_kind").get<std::string>();
    if (kind == "linked") {
        r.kind = LinkKind::Linked;
    } else if (kind == "duplicate") {
        r.kind = LinkKind::Duplicate;
    } else {
        throw Error(ErrorCode::ParseError, "unknown link_kind: " + kind);
    }
    r.created_at = j.value("created_at", "");
}

void to_json(json& j, const RelatedEdgeRecord& r) {
    j = json::object();
    j["source"] = r.source_question_id;
    j["target"] = r.target_question_id;
    j["rank"] = r.rank;
    j["origin"] = to_string(r.origin);
}

void from_json(const json& j, RelatedEdgeRecord& r) {
    r.source_question_id = j.at("source").get<PostId>();
    r.target_question_id = j.at("target").get<PostId>();
    r.rank = j.at("rank").get<int>();
    r.origin = edge_origin_from_string(j.at("origin").get<std::string>());
    if (r.rank < 1) throw Error(ErrorCode::ParseError, "related edge rank must be >= 1");
}

}  // namespace glsb
