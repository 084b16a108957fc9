#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "glsb/review.hpp"
#include "support.hpp"

using namespace glsb;
using namespace glsb::review;

namespace {

Label valid(PostId id, std::string reviewer, std::vector<std::string> q1 = {"code"}) {
    Label l;
    l.discussion_id = id;
    l.reviewer = std::move(reviewer);
    l.verdict = Verdict::Valid;
    l.codes["Q1"] = std::move(q1);
    l.created_at = "2021-03-01T00:00:00Z";
    return l;
}

Label false_positive(PostId id, std::string reviewer, std::string rule = "R1") {
    Label l;
    l.discussion_id = id;
    l.reviewer = std::move(reviewer);
    l.verdict = Verdict::FalsePositive;
    l.triggered_rule = std::move(rule);
    l.created_at = "2021-03-01T00:00:00Z";
    return l;
}

const IdSet kKnown{1, 2, 3, 4, 5};

/// Independent reading of the agreement rule.
std::pair<ConsensusStatus, std::optional<Verdict>> expected(const std::vector<Label>& labels) {
    if (labels.size() < 2) return {ConsensusStatus::Pending, std::nullopt};
    auto q1 = [](const Label& l) {
        std::set<std::string> s;
        if (auto it = l.codes.find("Q1"); it != l.codes.end()) s.insert(it->second.begin(), it->second.end());
        return s;
    };
    if (labels.size() == 2) {
        if (labels[0].verdict == labels[1].verdict && q1(labels[0]) == q1(labels[1]))
            return {ConsensusStatus::Agreed, labels[0].verdict};
        return {ConsensusStatus::Conflict, std::nullopt};
    }
    int v = 0, f = 0;
    for (const auto& l : labels) (l.verdict == Verdict::Valid ? v : f)++;
    if (v == f) return {ConsensusStatus::Conflict, std::nullopt};
    return {ConsensusStatus::Resolved, v > f ? Verdict::Valid : Verdict::FalsePositive};
}

}  // namespace

TEST(Consensus, TwoAgreeingReviewers) {
    ReviewLog log(LabelSchema::default_schema());
    EXPECT_EQ(log.submit(valid(1, "ana", {"code", "test"}), kKnown, {}, "t1").status, ConsensusStatus::Pending);
    const auto s = log.submit(valid(1, "ben", {"test", "code"}), kKnown, {}, "t2");
    EXPECT_EQ(s.status, ConsensusStatus::Agreed);
    EXPECT_EQ(s.verdict, Verdict::Valid);
    EXPECT_EQ(s.reviewers, (std::vector<std::string>{"ana", "ben"}));
    EXPECT_EQ(s.codes.at("Q1"), (std::vector<std::string>{"code", "test"}));
}

TEST(Consensus, DifferingCodesConflictThenMajority) {
    ReviewLog log(LabelSchema::default_schema());
    log.submit(valid(1, "ana", {"code"}), kKnown, {}, "t1");
    EXPECT_EQ(log.submit(valid(1, "ben", {"design"}), kKnown, {}, "t2").status, ConsensusStatus::Conflict);
    const auto s = log.submit(valid(1, "cleo", {"design"}), kKnown, {}, "t3");
    EXPECT_EQ(s.status, ConsensusStatus::Resolved);
    EXPECT_EQ(s.verdict, Verdict::Valid);
    EXPECT_EQ(s.codes.at("Q1"), (std::vector<std::string>{"code", "design"}));
}

TEST(Consensus, VerdictConflictResolvedToFalsePositive) {
    ReviewLog log(LabelSchema::default_schema());
    log.submit(valid(2, "ana"), kKnown, {}, "t1");
    EXPECT_EQ(log.submit(false_positive(2, "ben"), kKnown, {}, "t2").status, ConsensusStatus::Conflict);
    const auto s = log.submit(false_positive(2, "cleo", "R2"), kKnown, {}, "t3");
    EXPECT_EQ(s.verdict, Verdict::FalsePositive);
    EXPECT_TRUE(valid_set(log, kKnown).empty());
}

TEST(Consensus, EvenSplitStaysInConflict) {
    ReviewLog log(LabelSchema::default_schema());
    log.submit(valid(1, "a"), kKnown);
    log.submit(valid(1, "b", {"test"}), kKnown);
    log.submit(false_positive(1, "c"), kKnown);
    EXPECT_EQ(log.submit(false_positive(1, "d"), kKnown).status, ConsensusStatus::Conflict);
}

TEST(Consensus, LatestLabelPerReviewerCounts) {
    ReviewLog log(LabelSchema::default_schema());
    log.submit(valid(1, "ana"), kKnown);
    log.submit(false_positive(1, "ben"), kKnown);
    EXPECT_EQ(log.submit(valid(1, "ben"), kKnown).status, ConsensusStatus::Agreed);
    EXPECT_EQ(log.labels_for(1).size(), 2u);
    EXPECT_EQ(log.entries().size(), 3u);
}

TEST(Consensus, ExhaustiveSmallLabelSets) {
    const auto schema = LabelSchema::default_schema();
    const std::vector<std::vector<std::string>> code_sets{{"code"}, {"test"}, {"code", "test"}};
    // Each reviewer choice: false positive, or valid with one of three Q1 sets.
    for (int n = 1; n <= 3; ++n) {
        int combos = 1;
        for (int i = 0; i < n; ++i) combos *= 4;
        for (int mask = 0; mask < combos; ++mask) {
            std::vector<Label> labels;
            int m = mask;
            for (int i = 0; i < n; ++i, m /= 4) {
                const std::string who(1, static_cast<char>('a' + i));
                labels.push_back(m % 4 == 3 ? false_positive(1, who) : valid(1, who, code_sets[m % 4]));
            }
            const auto want = expected(labels);
            std::vector<int> order(labels.size());
            std::iota(order.begin(), order.end(), 0);
            do {
                std::vector<Label> permuted;
                for (int i : order) permuted.push_back(labels[static_cast<std::size_t>(i)]);
                const auto got = compute_consensus(1, permuted, schema);
                ASSERT_EQ(got.status, want.first) << "mask " << mask << " n " << n;
                ASSERT_EQ(got.verdict, want.second);
                ASSERT_EQ(got, compute_consensus(1, labels, schema));
            } while (std::next_permutation(order.begin(), order.end()));
        }
    }
}

TEST(Submit, RepeatedTokenAppendsOnce) {
    ReviewLog log(LabelSchema::default_schema());
    const auto first = log.submit(valid(1, "ana"), kKnown, "tok-1", "t1");
    const auto again = log.submit(valid(1, "ana", {"test"}), kKnown, "tok-1", "t2");
    EXPECT_EQ(first, again);
    EXPECT_EQ(log.entries().size(), 1u);
    EXPECT_EQ(log.labels_for(1)[0].codes.at("Q1"), std::vector<std::string>{"code"});
}

TEST(Submit, SchemaErrorsNameFields) {
    ReviewLog log(LabelSchema::default_schema());
    Label bad = false_positive(1, "");
    bad.triggered_rule.reset();
    bad.codes["Q9"] = {"x"};
    try {
        log.submit(bad, kKnown);
        FAIL();
    } catch (const LabelRejected& e) {
        EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
        std::set<std::string> fields;
        for (const auto& f : e.errors()) fields.insert(f.field);
        EXPECT_EQ(fields, (std::set<std::string>{"reviewer", "triggered_rule", "codes.Q9"}));
    }
    EXPECT_TRUE(log.entries().empty());

    const auto unknown_code = validate_label(valid(1, "ana", {"not-a-type"}), log.schema());
    ASSERT_EQ(unknown_code.size(), 1u);
    EXPECT_EQ(unknown_code[0].field, "codes.Q1");
    EXPECT_EQ(validate_label(valid(1, "ana", {}), log.schema()).size(), 1u);
    Label ruled = valid(1, "ana");
    ruled.triggered_rule = "R1";
    EXPECT_EQ(validate_label(ruled, log.schema())[0].field, "triggered_rule");
    EXPECT_EQ(validate_label(false_positive(1, "ana", "R9"), log.schema())[0].field, "triggered_rule");
}

TEST(Submit, UnknownDiscussionIsNotFound) {
    ReviewLog log(LabelSchema::default_schema());
    try {
        log.submit(valid(42, "ana"), kKnown);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotFound);
    }
}

TEST(Log, ReplayIsByteIdentical) {
    ReviewLog log(LabelSchema::default_schema());
    log.submit(valid(1, "ana"), kKnown, "a", "t1");
    log.submit(false_positive(1, "ben"), kKnown, "b", "t2");
    log.merge_codes({"Q2", "slow builds", "slow build"}, "m", "t3");
    log.mark_milestone({"saturation", "no new codes"}, {}, "t4");
    log.submit(valid(1, "cleo"), kKnown, {}, "t5");
    const auto exported = log.export_log();
    const auto replayed = ReviewLog::replay(log.schema(), exported);
    EXPECT_EQ(replayed.export_log(), exported);
    EXPECT_EQ(replayed.consensus(1), log.consensus(1));
    EXPECT_EQ(replayed.milestones().size(), 1u);
    EXPECT_EQ(replayed.last_recorded_at(), "t5");
}

TEST(Log, FileBackedReopen) {
    glsb::testing::TempDir dir;
    const auto path = dir / "labels.jsonl";
    {
        ReviewLog log(LabelSchema::default_schema(), path);
        log.submit(valid(1, "ana"), kKnown, "a", "t1");
        log.submit(valid(1, "ben"), kKnown, "b", "t2");
    }
    ReviewLog reopened(LabelSchema::default_schema(), path);
    EXPECT_EQ(reopened.entries().size(), 2u);
    EXPECT_EQ(reopened.consensus(1).status, ConsensusStatus::Agreed);
    reopened.submit(valid(1, "ana"), kKnown, "a", "t3");
    EXPECT_EQ(reopened.entries().size(), 2u);
}

TEST(Merges, RenameAppliesToLaterStates) {
    ReviewLog log(LabelSchema::default_schema());
    Label a = valid(1, "ana");
    a.codes["Q2"] = {"slow builds"};
    log.submit(a, kKnown);
    log.merge_codes({"Q2", "slow builds", "slow build"});
    EXPECT_EQ(log.labels_for(1)[0].codes.at("Q2"), std::vector<std::string>{"slow build"});
    EXPECT_THROW(log.merge_codes({"Q1", "code", "design"}), Error);
    EXPECT_THROW(log.merge_codes({"Q2", "slow build", "slow builds"}), Error);
    EXPECT_THROW(log.merge_codes({"Q7", "x", "y"}), Error);
}

TEST(Queue, TiersAndOrder) {
    ReviewLog log(LabelSchema::default_schema());
    log.submit(valid(4, "ana"), kKnown);
    log.submit(false_positive(4, "ben"), kKnown);  // conflict
    log.submit(valid(3, "ana"), kKnown);           // pending, labeled by someone else
    log.submit(valid(2, "ana"), kKnown);
    log.submit(valid(2, "ben"), kKnown);           // agreed
    EXPECT_EQ(screening_queue(log, kKnown, "cleo"), (std::vector<PostId>{4, 3, 1, 5}));
    EXPECT_EQ(screening_queue(log, kKnown, "ana"), (std::vector<PostId>{1, 5}));
    EXPECT_EQ(screening_queue(log, kKnown, "ben"), (std::vector<PostId>{3, 1, 5}));
    EXPECT_EQ(undecided(log, kKnown), (IdSet{1, 3, 4, 5}));
    EXPECT_EQ(valid_set(log, kKnown), (IdSet{2}));
}

TEST(LabelJson, RoundTrip) {
    Label l = false_positive(3, "ben", "R4");
    l.notes = "answers are generic";
    EXPECT_EQ(nlohmann::json(l).get<Label>(), l);
    const auto j = nlohmann::json(l);
    EXPECT_EQ(j.at("verdict"), "false_positive");
    EXPECT_TRUE(nlohmann::json::parse(R"({"discussion_id":1,"reviewer":"a","verdict":"maybe"})").is_object());
    EXPECT_THROW(nlohmann::json::parse(R"({"discussion_id":1,"reviewer":"a","verdict":"maybe"})").get<Label>(),
                 Error);
}
