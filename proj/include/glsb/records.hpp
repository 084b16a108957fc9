#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace glsb {

using PostId = std::int64_t;
using UserId = std::int64_t;

enum class PostKind { Question, Answer };

struct PostRecord {
    PostId id = 0;
    PostKind kind = PostKind::Question;
    std::optional<PostId> parent_id;  // answers only
    std::string title;                // questions only
    std::string body;                 // HTML, verbatim
    std::vector<std::string> tags;    // questions only, lowercase
    std::int64_t score = 0;
    std::optional<UserId> owner_id;
    std::optional<PostId> accepted_answer_id;
    std::string created_at;  // ISO-8601 UTC

    bool is_question() const { return kind == PostKind::Question; }
    bool operator==(const PostRecord&) const = default;
};

struct CommentRecord {
    std::int64_t id = 0;
    PostId post_id = 0;
    std::string body;
    std::int64_t score = 0;
    std::optional<UserId> author_id;

    bool operator==(const CommentRecord&) const = default;
};

enum class LinkKind { Linked, Duplicate };

struct PostLinkRecord {
    std::int64_t id = 0;
    PostId source_post_id = 0;
    PostId target_post_id = 0;
    LinkKind kind = LinkKind::Linked;
    std::string created_at;

    bool operator==(const PostLinkRecord&) const = default;
};

enum class EdgeOrigin { Api, Local };

struct RelatedEdgeRecord {
    PostId source_question_id = 0;
    PostId target_question_id = 0;
    int rank = 1;  // 1-based position in the source's related list
    EdgeOrigin origin = EdgeOrigin::Local;

    bool operator==(const RelatedEdgeRecord&) const = default;
};

std::string_view to_string(PostKind kind);
std::string_view to_string(LinkKind kind);
std::string_view to_string(EdgeOrigin origin);
EdgeOrigin edge_origin_from_string(std::string_view text);

void to_json(nlohmann::json& j, const PostRecord& r);
void from_json(const nlohmann::json& j, PostRecord& r);
void to_json(nlohmann::json& j, const CommentRecord& r);
void from_json(const nlohmann::json& j, CommentRecord& r);
void to_json(nlohmann::json& j, const PostLinkRecord& r);
void from_json(const nlohmann::json& j, PostLinkRecord& r);
void to_json(nlohmann::json& j, const RelatedEdgeRecord& r);
void from_json(const nlohmann::json& j, RelatedEdgeRecord& r);

}  // namespace glsb
