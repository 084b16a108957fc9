#include "glsb/corpus.hpp"

#include <algorithm>

namespace glsb {

bool answered_by_other(const Discussion& d) {
    const auto& asker = d.question.owner_id;
    return std::any_of(d.answers.begin(), d.answers.end(), [&](const PostRecord& a) {
        return !asker || !a.owner_id || *a.owner_id != *asker;
    });
}

void refresh_derived(Discussion& d) {
    d.answer_count = static_cast<int>(d.answers.size());
    d.discussion_score = d.question.score;
    for (const auto& a : d.answers) d.discussion_score += a.score;
    d.complete = answered_by_other(d);
    d.trustworthy = d.discussion_score >= 0;
}

Corpus Corpus::assemble(std::span<const PostRecord> posts,
                        std::span<const CommentRecord> comments) {
    Corpus c;
    for (const auto& p : posts) {
        if (!p.is_question()) continue;
        Discussion d;
        d.question = p;
        c.discussions_.push_back(std::move(d));
    }
    std::sort(c.discussions_.begin(), c.discussions_.end(),
              [](const Discussion& a, const Discussion& b) { return a.id() < b.id(); });
    for (std::size_t i = 0; i < c.discussions_.size(); ++i) {
        const auto qid = c.discussions_[i].id();
        c.by_question_[qid] = i;
        c.post_to_question_[qid] = qid;
    }

    for (const auto& p : posts) {
        if (p.is_question()) continue;
        auto it = p.parent_id ? c.by_question_.find(*p.parent_id) : c.by_question_.end();
        if (it == c.by_question_.end()) {
            c.diagnostics_.push_back({AssemblyDiagnostic::Kind::OrphanAnswer, p.id,
                                      "answer " + std::to_string(p.id) +
                                          " has no question in the corpus"});
            continue;
        }
        c.discussions_[it->second].answers.push_back(p);
        c.post_to_question_[p.id] = it->first;
    }

    for (const auto& cm : comments) {
        auto owner = c.post_to_question_.find(cm.post_id);
        if (owner == c.post_to_question_.end()) {
            c.diagnostics_.push_back({AssemblyDiagnostic::Kind::OrphanComment, cm.id,
                                      "comment " + std::to_string(cm.id) +
                                          " refers to unknown post " +
                                          std::to_string(cm.post_id)});
            continue;
        }
        c.discussions_[c.by_question_.at(owner->second)].comments[cm.post_id].push_back(cm);
    }

    for (auto& d : c.discussions_) {
        std::sort(d.answers.begin(), d.answers.end(),
                  [](const PostRecord& a, const PostRecord& b) { return a.id < b.id; });
        for (auto& [post, list] : d.comments) {
            std::sort(list.begin(), list.end(),
                      [](const CommentRecord& a, const CommentRecord& b) { return a.id < b.id; });
        }
        refresh_derived(d);
        const bool owner_missing =
            !d.question.owner_id ||
            std::any_of(d.answers.begin(), d.answers.end(),
                        [](const PostRecord& a) { return !a.owner_id; });
        if (owner_missing && !d.answers.empty()) {
            c.diagnostics_.push_back({AssemblyDiagnostic::Kind::MissingOwner, d.id(),
                                      "discussion " + std::to_string(d.id()) +
                                          " has posts without owner; treated as distinct authors"});
        }
    }
    return c;
}

const Discussion* Corpus::find(PostId question_id) const {
    auto it = by_question_.find(question_id);
    return it == by_question_.end() ? nullptr : &discussions_[it->second];
}

std::optional<PostId> Corpus::question_of(PostId post_id) const {
    auto it = post_to_question_.find(post_id);
    if (it == post_to_question_.end()) return std::nullopt;
    return it->second;
}

namespace {

template <typename Pred>
FilterResult partition_by(std::span<const Discussion> discussions, Pred pred) {
    FilterResult r;
    for (const auto& d : discussions) (pred(d) ? r.kept : r.removed).push_back(d);
    return r;
}

}  // namespace

FilterResult filter_complete(std::span<const Discussion> discussions) {
    return partition_by(discussions, [](const Discussion& d) { return answered_by_other(d); });
}

FilterResult filter_trustworthy(std::span<const Discussion> discussions) {
    return partition_by(discussions, [](const Discussion& d) {
        std::int64_t score = d.question.score;
        for (const auto& a : d.answers) score += a.score;
        return score >= 0;
    });
}

}  // namespace glsb
