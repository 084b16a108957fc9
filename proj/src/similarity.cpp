#include "glsb/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "glsb/error.hpp"
#include "glsb/text.hpp"

namespace glsb::similarity {

std::string_view to_string(Field f) {
    switch (f) {
        case Field::Tags: return "tags";
        case Field::Title: return "title";
        case Field::Body: return "body";
    }
    return "unknown";
}

std::vector<std::string> default_stopwords() {
    return {"a",    "an",    "and",  "are",   "as",    "at",   "be",   "but",  "by",
            "for",  "if",    "in",   "into",  "is",    "it",   "no",   "not",  "of",
            "on",   "or",    "such", "that",  "the",   "their", "then", "there", "these",
            "they", "this",  "to",   "was",   "will",  "with"};
}

double SimilarityConfig::weight(Field f) const {
    switch (f) {
        case Field::Tags: return weight_tags;
        case Field::Title: return weight_title;
        case Field::Body: return weight_body;
    }
    return 0.0;
}

void SimilarityConfig::validate() const {
    if (!(weight_tags > 0 && weight_title > 0 && weight_body > 0))
        throw Error(ErrorCode::InvalidArgument, "field weights must be > 0");
    if (top_k < 1) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");
    if (max_query_terms < 1) throw Error(ErrorCode::InvalidArgument, "max_query_terms must be >= 1");
    if (min_token_len < 1) throw Error(ErrorCode::InvalidArgument, "min_token_len must be >= 1");
}

void to_json(nlohmann::json& j, const SimilarityConfig& c) {
    j = {{"weight_tags", c.weight_tags},
         {"weight_title", c.weight_title},
         {"weight_body", c.weight_body},
         {"max_query_terms", c.max_query_terms},
         {"top_k", c.top_k},
         {"stopwords", c.stopwords},
         {"min_token_len", c.min_token_len},
         {"stemming", c.stemming},
         {"body_includes_answers", c.body_includes_answers}};
}

void from_json(const nlohmann::json& j, SimilarityConfig& c) {
    SimilarityConfig d;
    c.weight_tags = j.value("weight_tags", d.weight_tags);
    c.weight_title = j.value("weight_title", d.weight_title);
    c.weight_body = j.value("weight_body", d.weight_body);
    c.max_query_terms = j.value("max_query_terms", d.max_query_terms);
    c.top_k = j.value("top_k", d.top_k);
    c.stopwords = j.value("stopwords", d.stopwords);
    c.min_token_len = j.value("min_token_len", d.min_token_len);
    c.stemming = j.value("stemming", d.stemming);
    c.body_includes_answers = j.value("body_includes_answers", d.body_includes_answers);
    c.validate();
}

std::string stem_plural(std::string_view w) {
    auto ends = [&](std::string_view s) {
        return w.size() > s.size() && w.substr(w.size() - s.size()) == s;
    };
    if (ends("ies") && !ends("eies") && !ends("aies")) {
        return std::string(w.substr(0, w.size() - 3)) + "y";
    }
    if (ends("es") && !ends("aes") && !ends("ees") && !ends("oes")) {
        return std::string(w.substr(0, w.size() - 1));
    }
    if (ends("s") && !ends("us") && !ends("ss")) {
        return std::string(w.substr(0, w.size() - 1));
    }
    return std::string(w);
}

Tokenizer::Tokenizer(const SimilarityConfig& config)
    : min_len_(static_cast<std::size_t>(config.min_token_len)),
      stemming_(config.stemming),
      stopwords_(config.stopwords.begin(), config.stopwords.end()) {}

std::vector<std::string> Tokenizer::operator()(std::string_view input) const {
    const auto plain = text::to_lower(text::strip_html(input));
    std::vector<std::string> out;
    auto is_word = [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || u >= 0x80;
    };
    std::size_t i = 0;
    while (i < plain.size()) {
        while (i < plain.size() && !is_word(plain[i])) ++i;
        const auto start = i;
        while (i < plain.size() && is_word(plain[i])) ++i;
        if (i == start) continue;
        std::string token = plain.substr(start, i - start);
        if (text::utf8_length(token) < min_len_) continue;
        if (stopwords_.count(token) != 0) continue;
        if (stemming_) token = stem_plural(token);
        out.push_back(std::move(token));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text, const SimilarityConfig& config) {
    return Tokenizer(config)(text);
}

std::size_t FieldIndex::df(const std::string& term) const {
    auto it = postings.find(term);
    return it == postings.end() ? 0 : it->second.size();
}

double FieldIndex::idf(const std::string& term) const {
    const auto d = df(term);
    if (d == 0) return 0.0;
    return std::log(1.0 + static_cast<double>(doc_count) / static_cast<double>(d));
}

int FieldIndex::length(PostId doc) const {
    auto it = lengths.find(doc);
    return it == lengths.end() ? 0 : it->second;
}

DocumentText document_text(const Discussion& d, const SimilarityConfig& config) {
    DocumentText t;
    t.tags = d.question.tags;
    t.title = d.question.title;
    t.body = d.question.body;
    if (config.body_includes_answers) {
        for (const auto& a : d.answers) {
            t.body += '\n';
            t.body += a.body;
        }
    }
    return t;
}

Index Index::build(std::span<const Discussion> discussions, const SimilarityConfig& config) {
    config.validate();
    const Tokenizer tokenize(config);
    Index index;
    for (const auto& d : discussions) {
        const auto doc = d.id();
        const auto text = document_text(d, config);
        std::array<std::vector<std::string>, kFieldCount> tokens;
        for (const auto& tag : text.tags) tokens[0].push_back(text::to_lower(tag));
        tokens[1] = tokenize(text.title);
        tokens[2] = tokenize(text.body);

        auto& fwd = index.forward_[doc];
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            std::map<std::string, int> counts;
            for (const auto& t : tokens[f]) ++counts[t];
            fwd[f].assign(counts.begin(), counts.end());
            auto& field = index.fields_[f];
            if (tokens[f].empty()) continue;
            ++field.doc_count;
            field.lengths[doc] = static_cast<int>(tokens[f].size());
            for (const auto& [term, tf] : counts) field.postings[term].push_back({doc, tf});
        }
        index.documents_.push_back(doc);
    }
    std::sort(index.documents_.begin(), index.documents_.end());
    for (auto& field : index.fields_) {
        for (auto& [term, list] : field.postings) {
            std::sort(list.begin(), list.end(),
                      [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
        }
    }
    return index;
}

const std::vector<std::pair<std::string, int>>& Index::terms(PostId doc, Field f) const {
    auto it = forward_.find(doc);
    if (it == forward_.end())
        throw Error(ErrorCode::NotFound, "document " + std::to_string(doc) + " is not indexed");
    return it->second[static_cast<std::size_t>(f)];
}

std::vector<std::string> query_terms(PostId source, const Index& index,
                                     const SimilarityConfig& config) {
    if (!index.contains(source))
        throw Error(ErrorCode::NotFound, "question " + std::to_string(source) + " is not indexed");
    std::map<std::string, double> weight;
    for (const auto f : kFields) {
        const auto& field = index.field(f);
        for (const auto& [term, tf] : index.terms(source, f)) {
            weight[term] += tf * field.idf(term);
        }
    }
    std::vector<std::pair<std::string, double>> ranked(weight.begin(), weight.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > static_cast<std::size_t>(config.max_query_terms))
        ranked.resize(static_cast<std::size_t>(config.max_query_terms));
    std::vector<std::string> terms;
    for (auto& [term, w] : ranked) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    return terms;
}

std::vector<ScoredDoc> more_like_this(PostId source, const Index& index,
                                      const SimilarityConfig& config) {
    config.validate();
    const auto terms = query_terms(source, index, config);
    std::unordered_map<PostId, double> acc;
    for (const auto& term : terms) {
        for (const auto f : kFields) {
            const auto& field = index.field(f);
            auto it = field.postings.find(term);
            if (it == field.postings.end()) continue;
            const double idf = field.idf(term);
            const double w = config.weight(f);
            for (const auto& p : it->second) {
                if (p.doc == source) continue;
                acc[p.doc] += p.tf * idf * w / std::sqrt(static_cast<double>(field.length(p.doc)));
            }
        }
    }
    std::vector<ScoredDoc> ranked;
    ranked.reserve(acc.size());
    for (const auto& [doc, score] : acc) {
        if (score > 0.0) ranked.push_back({doc, score});
    }
    std::sort(ranked.begin(), ranked.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (ranked.size() > static_cast<std::size_t>(config.top_k))
        ranked.resize(static_cast<std::size_t>(config.top_k));
    return ranked;
}

std::vector<RelatedEdgeRecord> generate_related_edges(const Index& index,
                                                      const SimilarityConfig& config) {
    std::vector<RelatedEdgeRecord> edges;
    for (const auto doc : index.documents()) {
        int rank = 0;
        for (const auto& hit : more_like_this(doc, index, config)) {
            edges.push_back({doc, hit.id, ++rank, EdgeOrigin::Local});
        }
    }
    return edges;
}

}  // namespace glsb::similarity
