#include "glsb/search.hpp"

#include <algorithm>

#include "glsb/error.hpp"
#include "glsb/text.hpp"

namespace glsb {

namespace {

constexpr std::pair<SearchField, std::string_view> kFieldNames[] = {
    {SearchField::QuestionTitle, "question_title"},
    {SearchField::QuestionBody, "question_body"},
    {SearchField::QuestionTags, "question_tags"},
    {SearchField::AnswerBody, "answer_body"},
    {SearchField::CommentBody, "comment_body"},
};

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u >= 0x80;
}

std::vector<std::string_view> word_tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && !is_word_byte(s[i])) ++i;
        const auto start = i;
        while (i < s.size() && is_word_byte(s[i])) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

bool contains_term(std::string_view haystack, std::string_view term, MatchMode mode) {
    if (mode == MatchMode::Substring) return haystack.find(term) != std::string_view::npos;
    const auto words = word_tokens(haystack);
    const auto needle = word_tokens(term);
    if (needle.empty() || needle.size() > words.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= words.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), words.begin() + static_cast<long>(i)))
            return true;
    }
    return false;
}

bool has(const std::vector<SearchField>& fields, SearchField f) {
    return std::find(fields.begin(), fields.end(), f) != fields.end();
}

}  // namespace

std::string_view to_string(SearchField field) {
    for (const auto& [f, name] : kFieldNames) {
        if (f == field) return name;
    }
    return "unknown";
}

std::string_view to_string(MatchMode mode) {
    return mode == MatchMode::Substring ? "substring" : "token";
}

std::vector<SearchField> SearchSpec::all_fields() {
    std::vector<SearchField> out;
    for (const auto& [f, name] : kFieldNames) out.push_back(f);
    return out;
}

std::vector<SearchField> SearchSpec::parse_fields(std::string_view text) {
    if (text == "all") return all_fields();
    std::vector<SearchField> out;
    for (const auto& part : text::split(text, ',')) {
        if (part.empty()) continue;
        auto it = std::find_if(std::begin(kFieldNames), std::end(kFieldNames),
                               [&](const auto& p) { return p.second == part; });
        if (it == std::end(kFieldNames))
            throw Error(ErrorCode::InvalidArgument, "unknown search field: " + part);
        out.push_back(it->first);
    }
    return out;
}

void SearchSpec::normalize() {
    std::vector<std::string> cleaned;
    for (const auto& t : terms) {
        if (!t.empty()) cleaned.push_back(text::to_lower(t));
    }
    std::sort(cleaned.begin(), cleaned.end());
    cleaned.erase(std::unique(cleaned.begin(), cleaned.end()), cleaned.end());
    terms = std::move(cleaned);
    std::sort(fields.begin(), fields.end());
    fields.erase(std::unique(fields.begin(), fields.end()), fields.end());
    if (terms.empty()) throw Error(ErrorCode::InvalidArgument, "search needs at least one term");
    if (fields.empty()) throw Error(ErrorCode::InvalidArgument, "search needs at least one field");
}

std::vector<SearchMatch> match(SearchSpec spec, std::span<const Discussion> discussions) {
    spec.normalize();
    std::vector<SearchMatch> out;
    for (const auto& d : discussions) {
        SearchMatch m{d.id(), {}};
        auto probe = [&](SearchField field, std::int64_t record, const std::string& lowered) {
            for (const auto& term : spec.terms) {
                if (contains_term(lowered, term, spec.mode)) m.hits.push_back({field, record, term});
            }
        };
        if (has(spec.fields, SearchField::QuestionTitle))
            probe(SearchField::QuestionTitle, d.id(), text::to_lower(text::strip_html(d.question.title)));
        if (has(spec.fields, SearchField::QuestionBody))
            probe(SearchField::QuestionBody, d.id(), text::to_lower(text::strip_html(d.question.body)));
        if (has(spec.fields, SearchField::QuestionTags)) {
            std::string joined;
            for (const auto& t : d.question.tags) joined += t + ' ';
            probe(SearchField::QuestionTags, d.id(), text::to_lower(joined));
        }
        if (has(spec.fields, SearchField::AnswerBody)) {
            for (const auto& a : d.answers)
                probe(SearchField::AnswerBody, a.id, text::to_lower(text::strip_html(a.body)));
        }
        if (has(spec.fields, SearchField::CommentBody)) {
            for (const auto& [post, list] : d.comments) {
                for (const auto& c : list)
                    probe(SearchField::CommentBody, c.id, text::to_lower(text::strip_html(c.body)));
            }
        }
        if (!m.hits.empty()) out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(), [](const SearchMatch& a, const SearchMatch& b) {
        return a.discussion_id < b.discussion_id;
    });
    return out;
}

std::size_t term_frequency(std::string_view term, std::span<const Discussion> discussions) {
    SearchSpec spec{{std::string(term)}, SearchSpec::all_fields(), MatchMode::Substring};
    return match(std::move(spec), discussions).size();
}

void to_json(nlohmann::json& j, const SearchSpec& s) {
    std::vector<std::string> fields;
    for (auto f : s.fields) fields.emplace_back(to_string(f));
    j = {{"terms", s.terms}, {"fields", fields}, {"match_mode", to_string(s.mode)}};
}

void from_json(const nlohmann::json& j, SearchSpec& s) {
    s.terms = j.at("terms").get<std::vector<std::string>>();
    s.fields.clear();
    for (const auto& f : j.at("fields")) {
        auto parsed = SearchSpec::parse_fields(f.get<std::string>());
        s.fields.insert(s.fields.end(), parsed.begin(), parsed.end());
    }
    const auto mode = j.value("match_mode", std::string("substring"));
    if (mode == "substring") {
        s.mode = MatchMode::Substring;
    } else if (mode == "token") {
        s.mode = MatchMode::Token;
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown match_mode: " + mode);
    }
}

void to_json(nlohmann::json& j, const SearchMatch& m) {
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& h : m.hits)
        hits.push_back({{"field", to_string(h.field)}, {"id", h.record_id}, {"term", h.term}});
    j = {{"discussion_id", m.discussion_id}, {"hits", hits}};
}

}  // namespace glsb
