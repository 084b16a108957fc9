#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "glsb/corpus.hpp"
#include "glsb/records.hpp"

namespace glsb::similarity {

enum class Field : std::size_t { Tags = 0, Title = 1, Body = 2 };
inline constexpr std::size_t kFieldCount = 3;
inline constexpr std::array<Field, kFieldCount> kFields{Field::Tags, Field::Title, Field::Body};

std::string_view to_string(Field f);

/// The default English stop set (the classic 33-word list used by Lucene).
std::vector<std::string> default_stopwords();

struct SimilarityConfig {
    double weight_tags = 10.0;
    double weight_title = 5.0;
    double weight_body = 1.0;
    int max_query_terms = 25;
    int top_k = 10;
    std::vector<std::string> stopwords = default_stopwords();
    int min_token_len = 2;
    /// Light plural stemming; off unless requested.
    bool stemming = false;
    /// When false, the body field holds the question body only.
    bool body_includes_answers = true;

    double weight(Field f) const;
    /// Throws Error(InvalidArgument) when an invariant is broken.
    void validate() const;
};

void to_json(nlohmann::json& j, const SimilarityConfig& c);
void from_json(const nlohmann::json& j, SimilarityConfig& c);

class Tokenizer {
public:
    explicit Tokenizer(const SimilarityConfig& config);

    /// Strip markup, lowercase, split on non-alphanumerics, drop short tokens
    /// and stopwords. Order is preserved.
    std::vector<std::string> operator()(std::string_view text) const;

private:
    std::size_t min_len_;
    bool stemming_;
    std::unordered_set<std::string> stopwords_;
};

std::vector<std::string> tokenize(std::string_view text, const SimilarityConfig& config);

/// Harman's "S" stemmer: ies->y, es->e, s->"" with the usual exceptions.
std::string stem_plural(std::string_view word);

struct Posting {
    PostId doc = 0;
    int tf = 0;
    bool operator==(const Posting&) const = default;
};

struct FieldIndex {
    std::map<std::string, std::vector<Posting>> postings;  // postings sorted by doc
    std::size_t doc_count = 0;  // documents with a non-empty field
    std::unordered_map<PostId, int> lengths;

    std::size_t df(const std::string& term) const;
    double idf(const std::string& term) const;  // ln(1 + N/df); 0 when df == 0
    int length(PostId doc) const;
};

/// Three-field inverted index over question documents, plus a forward view
/// of each document used to pick query terms.
class Index {
public:
    static Index build(std::span<const Discussion> discussions, const SimilarityConfig& config);

    const FieldIndex& field(Field f) const { return fields_[static_cast<std::size_t>(f)]; }
    const std::vector<PostId>& documents() const { return documents_; }
    bool contains(PostId doc) const { return forward_.count(doc) != 0; }
    /// Term frequencies of one document field, sorted by term.
    const std::vector<std::pair<std::string, int>>& terms(PostId doc, Field f) const;

private:
    std::array<FieldIndex, kFieldCount> fields_;
    std::vector<PostId> documents_;
    std::unordered_map<PostId, std::array<std::vector<std::pair<std::string, int>>, kFieldCount>>
        forward_;
};

/// The field texts fed to the index for one discussion.
struct DocumentText {
    std::vector<std::string> tags;
    std::string title;
    std::string body;
};
DocumentText document_text(const Discussion& d, const SimilarityConfig& config);

struct ScoredDoc {
    PostId id = 0;
    double score = 0.0;
};

/// Query terms for a source document: its terms ranked by summed tf*idf over
/// fields (ties by term), truncated to max_query_terms, returned sorted by term.
std::vector<std::string> query_terms(PostId source, const Index& index,
                                     const SimilarityConfig& config);

/// Ranked similar questions. Score of candidate c:
///   sum over query terms t, fields f of tf(t,c,f) * idf_f(t) * weight_f / sqrt(len_f(c))
/// Candidates with zero score are not returned; the source never is. Ties
/// are broken by ascending id. Throws Error(NotFound) for an unknown source.
std::vector<ScoredDoc> more_like_this(PostId source, const Index& index,
                                      const SimilarityConfig& config);

/// One local-origin edge per (question, result) with rank = list position.
std::vector<RelatedEdgeRecord> generate_related_edges(const Index& index,
                                                      const SimilarityConfig& config);

}  // namespace glsb::similarity
