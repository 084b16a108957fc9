#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "glsb/corpus.hpp"
#include "glsb/linkgraph.hpp"
#include "glsb/rational.hpp"

namespace glsb {

enum class Strategy : std::uint8_t { LinkedBSB = 0, LinkedFSB = 1, RelatedBSB = 2, RelatedFSB = 3 };
inline constexpr std::array<Strategy, 4> kStrategies{Strategy::LinkedBSB, Strategy::LinkedFSB,
                                                     Strategy::RelatedBSB, Strategy::RelatedFSB};

std::string_view to_string(Strategy s);          // "LinkedBSB"
std::string_view short_name(Strategy s);         // "LB"
std::string_view display_name(Strategy s);       // "Linked BSB"
Strategy strategy_from_string(std::string_view text);
EdgeKind edge_kind(Strategy s);

/// Set of strategies that reached a discussion.
class Provenance {
public:
    constexpr Provenance() = default;
    Provenance(std::initializer_list<Strategy> strategies) {
        for (auto s : strategies) add(s);
    }

    void add(Strategy s) { bits_ |= bit(s); }
    void remove(Strategy s) { bits_ &= static_cast<std::uint8_t>(~bit(s)); }
    bool has(Strategy s) const { return (bits_ & bit(s)) != 0; }
    bool empty() const { return bits_ == 0; }
    std::size_t size() const;
    std::uint8_t bits() const { return bits_; }
    std::vector<Strategy> strategies() const;

    /// "LB+RB+RF"
    std::string short_label() const;
    /// "Linked BSB + Related BSB + Related FSB"
    std::string display_label() const;
    static Provenance parse(std::string_view short_label);

    friend auto operator<=>(const Provenance&, const Provenance&) = default;

private:
    static std::uint8_t bit(Strategy s) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s)); }
    std::uint8_t bits_ = 0;
};

struct StartSet {
    std::string project_id;
    IdSet ids;
    int iteration = 0;
};

struct FrontierFilter {
    int min_answers = 0;
    int min_score = 0;
    std::set<EdgeKind> apply_to{EdgeKind::Related};

    void validate() const;
};

enum class ExclusionReason { Incomplete, Untrustworthy, AlreadyExamined, BelowThreshold, External };
std::string_view to_string(ExclusionReason r);
ExclusionReason exclusion_from_string(std::string_view text);

struct Candidate {
    PostId id = 0;
    /// Strategies the candidate counts under once filtering is done. For a
    /// rejected candidate this equals `reached`.
    Provenance provenance;
    /// Every strategy whose frontier contained the discussion.
    Provenance reached;
    bool passed_filters = false;
    std::optional<ExclusionReason> excluded_reason;

    bool operator==(const Candidate&) const = default;
};

void to_json(nlohmann::json& j, const FrontierFilter& f);
void from_json(const nlohmann::json& j, FrontierFilter& f);
void to_json(nlohmann::json& j, const Candidate& c);
void from_json(const nlohmann::json& j, Candidate& c);

struct StartSetAverages {
    Rational answers;
    Rational score;
};

/// Exact means of answer_count and discussion_score over the start set.
StartSetAverages start_set_averages(const StartSet& start, const Corpus& corpus);

/// Thresholds at the floor of the start-set averages, applied to related edges.
FrontierFilter default_frontier_filter(const StartSetAverages& averages);

/// One snowballing iteration over the four strategies. Every reached
/// discussion goes through, in order: external endpoint, incomplete,
/// untrustworthy, already examined, then the frontier thresholds. The
/// thresholds (answer_count >= min_answers, question score >= min_score)
/// only strip strategies whose edge kind is in filter.apply_to; a candidate
/// is rejected as below_threshold when nothing remains. Returns one entry per
/// reached discussion sorted by id, passing or not.
std::vector<Candidate> run_iteration(const StartSet& start, const DiscussionGraph& graph,
                                     const Corpus& corpus, const FrontierFilter& filter,
                                     const IdSet& examined);

/// Passing candidates only.
std::vector<Candidate> passing(const std::vector<Candidate>& candidates);

/// Histogram of multi-strategy provenance sets among passing candidates.
std::map<Provenance, std::size_t> overlap_table(const std::vector<Candidate>& candidates);

/// Passing candidates counted once per strategy in their provenance.
std::array<std::size_t, 4> strategy_counts(const std::vector<Candidate>& candidates);

/// Passing candidates whose provenance is exactly one strategy, per strategy.
std::array<std::size_t, 4> single_strategy_counts(const std::vector<Candidate>& candidates);

}  // namespace glsb
