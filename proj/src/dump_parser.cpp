#include "glsb/dump_parser.hpp"

#include <charconv>
#include <cstring>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>

#include <expat.h>
#include <spdlog/spdlog.h>

#include "glsb/error.hpp"
#include "glsb/text.hpp"

namespace glsb {

namespace {

class Attributes {
public:
    explicit Attributes(const XML_Char** attrs) : attrs_(attrs) {}

    std::optional<std::string_view> get(std::string_view name) const {
        for (const XML_Char** a = attrs_; *a != nullptr; a += 2) {
            if (name == a[0]) return std::string_view(a[1]);
        }
        return std::nullopt;
    }

    std::string get_or(std::string_view name, std::string_view fallback = {}) const {
        auto v = get(name);
        return std::string(v ? *v : fallback);
    }

private:
    const XML_Char** attrs_;
};

struct RowFailure {
    std::string message;
};
struct RowSkip {};

template <typename Record>
using RowOutcome = std::variant<Record, RowSkip, RowFailure>;

std::optional<std::int64_t> to_int(std::string_view s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

// Required integer attribute; nullopt plus a message when absent or bad.
std::optional<std::int64_t> required_int(const Attributes& a, std::string_view name,
                                         std::string& why) {
    auto raw = a.get(name);
    if (!raw) {
        why = "missing attribute " + std::string(name);
        return std::nullopt;
    }
    auto v = to_int(*raw);
    if (!v) why = "attribute " + std::string(name) + " is not an integer: " + std::string(*raw);
    return v;
}

std::optional<std::int64_t> optional_int(const Attributes& a, std::string_view name) {
    auto raw = a.get(name);
    return raw ? to_int(*raw) : std::nullopt;
}

template <typename Record, typename Convert>
class RowParser {
public:
    RowParser(Convert convert, const std::function<void(Record&&)>& sink)
        : convert_(std::move(convert)), sink_(sink) {}

    ParseReport run(std::istream& in) {
        XML_Parser parser = XML_ParserCreate("UTF-8");
        if (parser == nullptr) throw Error(ErrorCode::Io, "cannot allocate XML parser");
        XML_SetUserData(parser, this);
        XML_SetStartElementHandler(parser, &RowParser::on_start);

        std::vector<char> buffer(1 << 16);
        bool done = false;
        while (!done) {
            in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
            const auto n = static_cast<int>(in.gcount());
            done = n == 0 || in.eof();
            if (XML_Parse(parser, buffer.data(), n, done ? 1 : 0) == XML_STATUS_ERROR) {
                const auto offset = XML_GetCurrentByteIndex(parser);
                std::string msg = "malformed XML at byte offset " + std::to_string(offset) +
                                  ": " + XML_ErrorString(XML_GetErrorCode(parser));
                XML_ParserFree(parser);
                throw Error(ErrorCode::ParseError, msg);
            }
            if (in.bad()) {
                XML_ParserFree(parser);
                throw Error(ErrorCode::Io, "read error while parsing dump");
            }
        }
        XML_ParserFree(parser);
        return std::move(report_);
    }

private:
    static void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
        auto* self = static_cast<RowParser*>(user);
        if (std::strcmp(name, "row") != 0) return;
        self->handle_row(Attributes(attrs));
    }

    void handle_row(const Attributes& attrs) {
        const auto index = report_.total_rows++;
        RowOutcome<Record> outcome = convert_(attrs);
        if (auto* rec = std::get_if<Record>(&outcome)) {
            ++report_.parsed;
            sink_(std::move(*rec));
        } else if (std::holds_alternative<RowSkip>(outcome)) {
            ++report_.skipped_kind;
        } else {
            auto& failure = std::get<RowFailure>(outcome);
            spdlog::warn("dump row {} skipped: {}", index, failure.message);
            report_.row_errors.push_back({index, std::move(failure.message)});
        }
    }

    Convert convert_;
    const std::function<void(Record&&)>& sink_;
    ParseReport report_;
};

template <typename Record, typename Convert>
ParseReport run_parser(std::istream& in, Convert convert,
                       const std::function<void(Record&&)>& sink) {
    RowParser<Record, Convert> parser(std::move(convert), sink);
    return parser.run(in);
}

RowOutcome<PostRecord> convert_post(const Attributes& a) {
    std::string why;
    const auto id = required_int(a, "Id", why);
    if (!id) return RowFailure{why};
    const auto type = required_int(a, "PostTypeId", why);
    if (!type) return RowFailure{why};
    if (*id <= 0) return RowFailure{"Id must be positive"};
    if (*type != 1 && *type != 2) return RowSkip{};

    PostRecord r;
    r.id = *id;
    r.kind = *type == 1 ? PostKind::Question : PostKind::Answer;
    r.body = a.get_or("Body");
    r.score = optional_int(a, "Score").value_or(0);
    r.owner_id = optional_int(a, "OwnerUserId");
    r.created_at = a.get_or("CreationDate");
    if (r.kind == PostKind::Question) {
        auto title = a.get("Title");
        if (!title) return RowFailure{"question without Title"};
        r.title = std::string(*title);
        r.tags = text::parse_tags(a.get_or("Tags"));
        r.accepted_answer_id = optional_int(a, "AcceptedAnswerId");
    } else {
        r.parent_id = optional_int(a, "ParentId");
        if (!r.parent_id) return RowFailure{"answer without ParentId"};
    }
    return r;
}

RowOutcome<CommentRecord> convert_comment(const Attributes& a) {
    std::string why;
    const auto id = required_int(a, "Id", why);
    if (!id) return RowFailure{why};
    const auto post = required_int(a, "PostId", why);
    if (!post) return RowFailure{why};
    CommentRecord r;
    r.id = *id;
    r.post_id = *post;
    r.body = a.get_or("Text");
    r.score = optional_int(a, "Score").value_or(0);
    if (r.score < 0) return RowFailure{"negative comment score"};
    r.author_id = optional_int(a, "UserId");
    return r;
}

RowOutcome<PostLinkRecord> convert_postlink(const Attributes& a) {
    std::string why;
    const auto id = required_int(a, "Id", why);
    if (!id) return RowFailure{why};
    const auto source = required_int(a, "PostId", why);
    if (!source) return RowFailure{why};
    const auto target = required_int(a, "RelatedPostId", why);
    if (!target) return RowFailure{why};
    const auto type = required_int(a, "LinkTypeId", why);
    if (!type) return RowFailure{why};
    PostLinkRecord r;
    r.id = *id;
    r.source_post_id = *source;
    r.target_post_id = *target;
    r.created_at = a.get_or("CreationDate");
    if (*type == 1) {
        r.kind = LinkKind::Linked;
        if (r.source_post_id == r.target_post_id) return RowFailure{"linked row points to itself"};
    } else if (*type == 3) {
        r.kind = LinkKind::Duplicate;
    } else {
        return RowSkip{};
    }
    return r;
}

template <typename Record>
ParseResult<Record> collect(std::istream& in,
                            ParseReport (*stream)(std::istream&,
                                                  const std::function<void(Record&&)>&)) {
    ParseResult<Record> result;
    result.report = stream(in, [&](Record&& r) { result.records.push_back(std::move(r)); });
    return result;
}

}  // namespace

ParseReport stream_posts(std::istream& in, const std::function<void(PostRecord&&)>& sink) {
    return run_parser<PostRecord>(in, convert_post, sink);
}

ParseReport stream_comments(std::istream& in, const std::function<void(CommentRecord&&)>& sink) {
    return run_parser<CommentRecord>(in, convert_comment, sink);
}

ParseReport stream_postlinks(std::istream& in,
                             const std::function<void(PostLinkRecord&&)>& sink) {
    return run_parser<PostLinkRecord>(in, convert_postlink, sink);
}

ParseResult<PostRecord> parse_posts(std::istream& in) { return collect(in, &stream_posts); }

ParseResult<CommentRecord> parse_comments(std::istream& in) {
    return collect(in, &stream_comments);
}

ParseResult<PostLinkRecord> parse_postlinks(std::istream& in) {
    return collect(in, &stream_postlinks);
}

}  // namespace glsb
