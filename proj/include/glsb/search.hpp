#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "glsb/corpus.hpp"

namespace glsb {

enum class SearchField { QuestionTitle, QuestionBody, QuestionTags, AnswerBody, CommentBody };
enum class MatchMode { Substring, Token };

std::string_view to_string(SearchField field);
std::string_view to_string(MatchMode mode);

struct SearchSpec {
    std::vector<std::string> terms;
    std::vector<SearchField> fields;
    MatchMode mode = MatchMode::Substring;

    /// Lowercases terms, sorts/dedups fields; throws on empty terms or fields.
    void normalize();

    static std::vector<SearchField> all_fields();
    /// "all" or a comma-separated list of field names.
    static std::vector<SearchField> parse_fields(std::string_view text);
};

struct SearchHit {
    SearchField field;
    std::int64_t record_id;  // post id, or comment id for comment_body
    std::string term;
};

struct SearchMatch {
    PostId discussion_id = 0;
    std::vector<SearchHit> hits;
};

/// Case-insensitive matching over HTML-stripped field text. Output is sorted
/// by discussion id; an empty corpus yields an empty result.
std::vector<SearchMatch> match(SearchSpec spec, std::span<const Discussion> discussions);

/// Number of discussions where `term` occurs in any field (substring mode).
std::size_t term_frequency(std::string_view term, std::span<const Discussion> discussions);

void to_json(nlohmann::json& j, const SearchSpec& s);
void from_json(const nlohmann::json& j, SearchSpec& s);
void to_json(nlohmann::json& j, const SearchMatch& m);

}  // namespace glsb
