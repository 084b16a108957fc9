#include <gtest/gtest.h>

#include <cmath>

#include "glsb/error.hpp"
#include "glsb/similarity.hpp"
#include "oracles/generators.hpp"
#include "oracles/similarity_oracle.hpp"
#include "support.hpp"

using namespace glsb;
using namespace glsb::similarity;
using glsb::testing::answer;
using glsb::testing::question;

namespace {

Corpus corpus_of(std::vector<PostRecord> posts) { return Corpus::assemble(posts, {}); }

void expect_matches_oracle(const Corpus& c, const SimilarityConfig& cfg) {
    const auto index = Index::build(c.discussions(), cfg);
    for (const auto& d : c.discussions()) {
        const auto got = more_like_this(d.id(), index, cfg);
        const auto want = oracle::brute_force_mlt(c.discussions(), d.id(), cfg);
        ASSERT_EQ(got.size(), want.size()) << "source " << d.id();
        for (std::size_t i = 0; i < got.size(); ++i) {
            ASSERT_EQ(got[i].id, want[i].first) << "source " << d.id() << " rank " << i;
            ASSERT_NEAR(got[i].score, want[i].second, 1e-9 * std::abs(want[i].second));
        }
    }
}

}  // namespace

TEST(Tokenize, Examples) {
    const SimilarityConfig cfg;
    EXPECT_EQ(tokenize("<p>Tech Debt!</p>", cfg), (std::vector<std::string>{"tech", "debt"}));
    EXPECT_TRUE(tokenize("a I x", cfg).empty());
}

TEST(Tokenize, FortyWordParagraph) {
    const SimilarityConfig cfg;
    const std::string paragraph =
        "<p>Our team kept a <b>technical-debt</b> register for 3 sprints; it was the only way "
        "to show the client why velocity dropped. We tagged every shortcut with an owner, a "
        "cost estimate and a due date, then reviewed it in each retro.</p>";
    const std::vector<std::string> want{
        "our", "team", "kept", "technical", "debt", "register", "sprints", "only", "way", "show",
        "client", "why", "velocity", "dropped", "we", "tagged", "every", "shortcut", "owner", "cost",
        "estimate", "due", "date", "reviewed", "each", "retro"};
    EXPECT_EQ(tokenize(paragraph, cfg), want);
}

TEST(Tokenize, MinLengthAndStemmingFlag) {
    SimilarityConfig cfg;
    cfg.min_token_len = 4;
    EXPECT_EQ(tokenize("risk plan scope", cfg), (std::vector<std::string>{"risk", "plan", "scope"}));
    EXPECT_EQ(tokenize("go big", cfg), std::vector<std::string>{});
    cfg.stemming = true;
    EXPECT_EQ(tokenize("stories estimates", cfg), (std::vector<std::string>{"story", "estimate"}));
}

TEST(Config, Validation) {
    SimilarityConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.weight_body = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = SimilarityConfig{};
    cfg.top_k = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = SimilarityConfig{};
    cfg.max_query_terms = 0;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(Config, JsonRoundTripKeepsDefaults) {
    const auto cfg = nlohmann::json::parse(R"({"weight_tags": 20})").get<SimilarityConfig>();
    EXPECT_EQ(cfg.weight_tags, 20);
    EXPECT_EQ(cfg.weight_title, 5);
    EXPECT_EQ(cfg.top_k, 10);
}

TEST(BuildIndex, SingleTitleTerm) {
    const SimilarityConfig cfg;
    const auto c = corpus_of({question(7, 1, 0, "scrum")});
    const auto index = Index::build(c.discussions(), cfg);
    const auto& title = index.field(Field::Title);
    ASSERT_EQ(title.postings.size(), 1u);
    EXPECT_EQ(title.postings.at("scrum"), (std::vector<Posting>{{7, 1}}));
    EXPECT_EQ(index.field(Field::Body).doc_count, 0u);
}

TEST(BuildIndex, SharedTagDf) {
    const SimilarityConfig cfg;
    const auto c = corpus_of({question(1, 1, 0, "a1", "", {"Agile"}), question(2, 1, 0, "b2", "", {"agile", "risk"})});
    const auto index = Index::build(c.discussions(), cfg);
    EXPECT_EQ(index.field(Field::Tags).df("agile"), 2u);
    EXPECT_EQ(index.field(Field::Tags).df("risk"), 1u);
    EXPECT_DOUBLE_EQ(index.field(Field::Tags).idf("agile"), std::log(2.0));
}

TEST(BuildIndex, BodyIncludesAnswersUnlessDisabled) {
    SimilarityConfig cfg;
    const auto c = corpus_of({question(1, 1, 0, "t", "question words"), answer(2, 1, 2, 0, "answer words")});
    EXPECT_EQ(Index::build(c.discussions(), cfg).field(Field::Body).df("answer"), 1u);
    cfg.body_includes_answers = false;
    EXPECT_EQ(Index::build(c.discussions(), cfg).field(Field::Body).df("answer"), 0u);
}

TEST(BuildIndex, EmptyCorpus) {
    const Corpus c;
    const auto index = Index::build(c.discussions(), SimilarityConfig{});
    EXPECT_TRUE(index.documents().empty());
}

TEST(BuildIndex, RecountMatchesOnTwentyQuestions) {
    gen::Rng rng(20);
    const SimilarityConfig cfg;
    const auto c = corpus_of(gen::similarity_posts(rng, 20));
    const auto index = Index::build(c.discussions(), cfg);
    const auto docs = oracle::oracle_docs(c.discussions(), cfg);
    for (int f = 0; f < 3; ++f) {
        const auto& field = index.field(static_cast<Field>(f));
        std::map<std::string, std::vector<Posting>> want;
        std::size_t n = 0;
        for (const auto& d : docs) {
            if (d.fields[f].empty()) continue;
            ++n;
            std::map<std::string, int> tf;
            for (const auto& t : d.fields[f]) ++tf[t];
            for (const auto& [t, k] : tf) want[t].push_back({d.id, k});
            EXPECT_EQ(field.length(d.id), static_cast<int>(d.fields[f].size()));
        }
        EXPECT_EQ(field.postings, want) << "field " << f;
        EXPECT_EQ(field.doc_count, n);
    }
}

TEST(MoreLikeThis, IdenticalPairRankEachOther) {
    const SimilarityConfig cfg;
    const auto c = corpus_of({question(1, 1, 0, "risk budget", "planning the budget", {"risk"}),
                              question(2, 1, 0, "risk budget", "planning the budget", {"risk"})});
    const auto index = Index::build(c.discussions(), cfg);
    const auto r1 = more_like_this(1, index, cfg);
    const auto r2 = more_like_this(2, index, cfg);
    ASSERT_EQ(r1.size(), 1u);
    ASSERT_EQ(r2.size(), 1u);
    EXPECT_EQ(r1[0].id, 2);
    EXPECT_EQ(r2[0].id, 1);
    EXPECT_DOUBLE_EQ(r1[0].score, r2[0].score);
}

TEST(MoreLikeThis, FieldWeightOrdering) {
    const SimilarityConfig cfg;
    // Same term once in one field of each candidate; all fields length 1.
    const auto c = corpus_of({question(1, 1, 0, "kanban", "kanban", {"kanban"}),
                              question(2, 1, 0, "zz", "yy", {"kanban"}),
                              question(3, 1, 0, "kanban", "yy", {"xx"}),
                              question(4, 1, 0, "zz", "kanban", {"xx"})});
    const auto index = Index::build(c.discussions(), cfg);
    const auto r = more_like_this(1, index, cfg);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0].id, 2);
    EXPECT_EQ(r[1].id, 3);
    EXPECT_EQ(r[2].id, 4);
}

TEST(MoreLikeThis, UnknownSource) {
    const SimilarityConfig cfg;
    const auto c = corpus_of({question(1)});
    const auto index = Index::build(c.discussions(), cfg);
    try {
        more_like_this(99, index, cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotFound);
    }
}

TEST(MoreLikeThis, ThirtyQuestionOracle) {
    gen::Rng rng(30);
    expect_matches_oracle(corpus_of(gen::similarity_posts(rng, 30)), SimilarityConfig{});
}

TEST(MoreLikeThis, RandomCorporaOracle) {
    for (int seed = 0; seed < 25; ++seed) {
        gen::Rng rng(1000 + seed);
        SimilarityConfig cfg;
        cfg.top_k = gen::uniform(rng, 1, 12);
        cfg.max_query_terms = gen::uniform(rng, 1, 30);
        cfg.body_includes_answers = seed % 4 != 0;
        expect_matches_oracle(corpus_of(gen::similarity_posts(rng, gen::uniform(rng, 2, 100))), cfg);
    }
}

TEST(MoreLikeThis, InvariantsAndRescaling) {
    for (int seed = 0; seed < 20; ++seed) {
        gen::Rng rng(seed);
        const auto c = corpus_of(gen::similarity_posts(rng, 40));
        SimilarityConfig base;
        SimilarityConfig scaled = base;
        const double k = 0.25 + seed * 0.7;
        scaled.weight_tags *= k;
        scaled.weight_title *= k;
        scaled.weight_body *= k;
        const auto index = Index::build(c.discussions(), base);
        for (const auto& d : c.discussions()) {
            const auto a = more_like_this(d.id(), index, base);
            const auto b = more_like_this(d.id(), index, scaled);
            ASSERT_EQ(a.size(), b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                ASSERT_NE(a[i].id, d.id());
                ASSERT_GE(a[i].score, 0.0);
                ASSERT_EQ(a[i].id, b[i].id) << "seed " << seed << " source " << d.id();
            }
        }
    }
}

TEST(GenerateEdges, TopOneOverThreeQuestions) {
    SimilarityConfig cfg;
    cfg.top_k = 1;
    const auto c = corpus_of({question(1, 1, 0, "risk plan"), question(2, 1, 0, "risk scope"),
                              question(3, 1, 0, "plan scope")});
    const auto edges = generate_related_edges(Index::build(c.discussions(), cfg), cfg);
    ASSERT_EQ(edges.size(), 3u);
    for (const auto& e : edges) {
        EXPECT_EQ(e.rank, 1);
        EXPECT_EQ(e.origin, EdgeOrigin::Local);
        EXPECT_NE(e.source_question_id, e.target_question_id);
    }
}

TEST(GenerateEdges, MatchesOracleAndIsDeterministic) {
    gen::Rng rng(31);
    const SimilarityConfig cfg;
    const auto c = corpus_of(gen::similarity_posts(rng, 30));
    const auto edges = generate_related_edges(Index::build(c.discussions(), cfg), cfg);
    std::vector<RelatedEdgeRecord> want;
    for (const auto& d : c.discussions()) {
        int rank = 0;
        for (const auto& [id, score] : oracle::brute_force_mlt(c.discussions(), d.id(), cfg))
            want.push_back({d.id(), id, ++rank, EdgeOrigin::Local});
    }
    EXPECT_EQ(edges, want);
    EXPECT_EQ(edges, generate_related_edges(Index::build(c.discussions(), cfg), cfg));
}
