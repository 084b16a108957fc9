#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "glsb/records.hpp"

namespace glsb {

/// A question with its answers and the comments attached to any of them.
struct Discussion {
    PostRecord question;
    std::vector<PostRecord> answers;                         // ascending id
    std::map<PostId, std::vector<CommentRecord>> comments;  // keyed by post id
    int answer_count = 0;
    std::int64_t discussion_score = 0;  // question + answers; comments are not posts
    bool complete = false;
    bool trustworthy = false;

    PostId id() const { return question.id; }
};

/// Answer authorship test used for completeness. A missing owner on either
/// side (deleted user) counts as a different author.
bool answered_by_other(const Discussion& d);

/// Recomputes the derived attributes from question/answers.
void refresh_derived(Discussion& d);

struct AssemblyDiagnostic {
    enum class Kind { OrphanAnswer, OrphanComment, MissingOwner };
    Kind kind;
    std::int64_t record_id;
    std::string message;
};

class Corpus {
public:
    Corpus() = default;

    static Corpus assemble(std::span<const PostRecord> posts,
                           std::span<const CommentRecord> comments);

    const std::vector<Discussion>& discussions() const { return discussions_; }
    const std::vector<AssemblyDiagnostic>& diagnostics() const { return diagnostics_; }

    const Discussion* find(PostId question_id) const;
    bool contains(PostId question_id) const { return find(question_id) != nullptr; }
    /// Question id owning a post (itself for questions); nullopt when unknown.
    std::optional<PostId> question_of(PostId post_id) const;

    std::size_t size() const { return discussions_.size(); }
    bool empty() const { return discussions_.empty(); }

private:
    std::vector<Discussion> discussions_;  // ascending question id
    std::unordered_map<PostId, std::size_t> by_question_;
    std::unordered_map<PostId, PostId> post_to_question_;
    std::vector<AssemblyDiagnostic> diagnostics_;
};

struct FilterResult {
    std::vector<Discussion> kept;
    std::vector<Discussion> removed;
};

/// Keeps discussions with at least one answer by someone other than the asker.
FilterResult filter_complete(std::span<const Discussion> discussions);

/// Keeps discussions whose score is non-negative (zero is kept).
FilterResult filter_trustworthy(std::span<const Discussion> discussions);

}  // namespace glsb
