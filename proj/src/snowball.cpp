#include "glsb/snowball.hpp"

#include <algorithm>
#include <bit>

#include "glsb/error.hpp"
#include "glsb/text.hpp"

namespace glsb {

namespace {

struct StrategyNames {
    Strategy strategy;
    std::string_view id;
    std::string_view short_name;
    std::string_view display;
};

constexpr std::array<StrategyNames, 4> kNames{{
    {Strategy::LinkedBSB, "LinkedBSB", "LB", "Linked BSB"},
    {Strategy::LinkedFSB, "LinkedFSB", "LF", "Linked FSB"},
    {Strategy::RelatedBSB, "RelatedBSB", "RB", "Related BSB"},
    {Strategy::RelatedFSB, "RelatedFSB", "RF", "Related FSB"},
}};

const StrategyNames& names(Strategy s) { return kNames[static_cast<std::size_t>(s)]; }

constexpr std::array<std::pair<ExclusionReason, std::string_view>, 5> kReasons{{
    {ExclusionReason::Incomplete, "incomplete"},
    {ExclusionReason::Untrustworthy, "untrustworthy"},
    {ExclusionReason::AlreadyExamined, "already_examined"},
    {ExclusionReason::BelowThreshold, "below_threshold"},
    {ExclusionReason::External, "external"},
}};

std::int64_t floor_of(const Rational& r) {
    auto q = r.num() / r.den();
    if (r.num() % r.den() != 0 && r.num() < 0) --q;
    return q;
}

}  // namespace

std::string_view to_string(Strategy s) { return names(s).id; }
std::string_view short_name(Strategy s) { return names(s).short_name; }
std::string_view display_name(Strategy s) { return names(s).display; }

Strategy strategy_from_string(std::string_view text) {
    for (const auto& n : kNames) {
        if (n.id == text || n.short_name == text) return n.strategy;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown strategy: " + std::string(text));
}

EdgeKind edge_kind(Strategy s) {
    return (s == Strategy::LinkedBSB || s == Strategy::LinkedFSB) ? EdgeKind::Linked
                                                                  : EdgeKind::Related;
}

std::size_t Provenance::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<Strategy> Provenance::strategies() const {
    std::vector<Strategy> out;
    for (auto s : kStrategies) {
        if (has(s)) out.push_back(s);
    }
    return out;
}

std::string Provenance::short_label() const {
    std::string out;
    for (auto s : strategies()) {
        if (!out.empty()) out += '+';
        out += short_name(s);
    }
    return out;
}

std::string Provenance::display_label() const {
    std::string out;
    for (auto s : strategies()) {
        if (!out.empty()) out += " + ";
        out += display_name(s);
    }
    return out;
}

Provenance Provenance::parse(std::string_view label) {
    Provenance p;
    for (const auto& part : text::split(label, '+')) {
        if (!part.empty()) p.add(strategy_from_string(part));
    }
    return p;
}

void FrontierFilter::validate() const {
    if (min_answers < 0 || min_score < 0)
        throw Error(ErrorCode::InvalidArgument, "frontier thresholds must be >= 0");
}

std::string_view to_string(ExclusionReason r) {
    for (const auto& [reason, name] : kReasons) {
        if (reason == r) return name;
    }
    return "unknown";
}

ExclusionReason exclusion_from_string(std::string_view text) {
    for (const auto& [reason, name] : kReasons) {
        if (name == text) return reason;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown exclusion reason: " + std::string(text));
}

void to_json(nlohmann::json& j, const FrontierFilter& f) {
    std::vector<std::string> kinds;
    for (auto k : f.apply_to) kinds.emplace_back(to_string(k));
    j = {{"min_answers", f.min_answers}, {"min_score", f.min_score}, {"apply_to", kinds}};
}

void from_json(const nlohmann::json& j, FrontierFilter& f) {
    f.min_answers = j.value("min_answers", 0);
    f.min_score = j.value("min_score", 0);
    f.apply_to.clear();
    for (const auto& k : j.value("apply_to", std::vector<std::string>{"related"})) {
        if (k == "linked") {
            f.apply_to.insert(EdgeKind::Linked);
        } else if (k == "related") {
            f.apply_to.insert(EdgeKind::Related);
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown edge kind: " + k);
        }
    }
    f.validate();
}

void to_json(nlohmann::json& j, const Candidate& c) {
    std::vector<std::string> prov;
    for (auto s : c.provenance.strategies()) prov.emplace_back(to_string(s));
    std::vector<std::string> reached;
    for (auto s : c.reached.strategies()) reached.emplace_back(to_string(s));
    j = {{"discussion_id", c.id},
         {"provenance", prov},
         {"reached", reached},
         {"passed_filters", c.passed_filters},
         {"excluded_reason", c.excluded_reason ? nlohmann::json(to_string(*c.excluded_reason))
                                               : nlohmann::json(nullptr)}};
}

void from_json(const nlohmann::json& j, Candidate& c) {
    c.id = j.at("discussion_id").get<PostId>();
    c.provenance = {};
    for (const auto& s : j.at("provenance")) c.provenance.add(strategy_from_string(s.get<std::string>()));
    c.reached = {};
    for (const auto& s : j.value("reached", j.at("provenance")))
        c.reached.add(strategy_from_string(s.get<std::string>()));
    c.passed_filters = j.at("passed_filters").get<bool>();
    const auto& reason = j.at("excluded_reason");
    c.excluded_reason = reason.is_null() ? std::nullopt
                                         : std::optional(exclusion_from_string(reason.get<std::string>()));
    if (c.passed_filters == c.excluded_reason.has_value())
        throw Error(ErrorCode::ParseError, "candidate passed_filters disagrees with excluded_reason");
}

StartSetAverages start_set_averages(const StartSet& start, const Corpus& corpus) {
    if (start.ids.empty()) throw Error(ErrorCode::InvalidArgument, "start set is empty");
    std::int64_t answers = 0;
    std::int64_t score = 0;
    for (const auto id : start.ids) {
        const auto* d = corpus.find(id);
        if (d == nullptr)
            throw Error(ErrorCode::NotFound, "start set id " + std::to_string(id) + " not in corpus");
        answers += d->answer_count;
        score += d->discussion_score;
    }
    const auto n = static_cast<std::int64_t>(start.ids.size());
    return {Rational(answers, n), Rational(score, n)};
}

FrontierFilter default_frontier_filter(const StartSetAverages& averages) {
    FrontierFilter f;
    f.min_answers = static_cast<int>(std::max<std::int64_t>(0, floor_of(averages.answers)));
    f.min_score = static_cast<int>(std::max<std::int64_t>(0, floor_of(averages.score)));
    return f;
}

std::vector<Candidate> run_iteration(const StartSet& start, const DiscussionGraph& graph,
                                     const Corpus& corpus, const FrontierFilter& filter,
                                     const IdSet& examined) {
    filter.validate();
    for (const auto id : start.ids) {
        if (!corpus.contains(id))
            throw Error(ErrorCode::InvalidArgument,
                        "start set id " + std::to_string(id) + " not in corpus");
        if (examined.count(id) == 0)
            throw Error(ErrorCode::InvalidArgument,
                        "examined set must contain start id " + std::to_string(id));
    }

    std::map<PostId, Provenance> reached;
    for (const auto s : kStrategies) {
        const bool backward = s == Strategy::LinkedBSB || s == Strategy::RelatedBSB;
        const auto frontier = backward ? graph.out_neighbors(start.ids, edge_kind(s))
                                       : graph.in_neighbors(start.ids, edge_kind(s));
        for (const auto id : frontier) reached[id].add(s);
    }

    std::vector<Candidate> out;
    out.reserve(reached.size());
    for (const auto& [id, prov] : reached) {
        Candidate c{id, prov, prov, false, std::nullopt};
        const auto* d = corpus.find(id);
        if (d == nullptr || graph.is_external(id)) {
            c.excluded_reason = ExclusionReason::External;
        } else if (!d->complete) {
            c.excluded_reason = ExclusionReason::Incomplete;
        } else if (!d->trustworthy) {
            c.excluded_reason = ExclusionReason::Untrustworthy;
        } else if (examined.count(id) != 0) {
            c.excluded_reason = ExclusionReason::AlreadyExamined;
        } else {
            const bool below =
                d->answer_count < filter.min_answers || d->question.score < filter.min_score;
            Provenance kept = prov;
            if (below) {
                for (auto s : prov.strategies()) {
                    if (filter.apply_to.count(edge_kind(s)) != 0) kept.remove(s);
                }
            }
            if (kept.empty()) {
                c.excluded_reason = ExclusionReason::BelowThreshold;
            } else {
                c.provenance = kept;
                c.passed_filters = true;
            }
        }
        out.push_back(c);
    }
    return out;
}

std::vector<Candidate> passing(const std::vector<Candidate>& candidates) {
    std::vector<Candidate> out;
    std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(out),
                 [](const Candidate& c) { return c.passed_filters; });
    return out;
}

std::map<Provenance, std::size_t> overlap_table(const std::vector<Candidate>& candidates) {
    std::map<Provenance, std::size_t> table;
    for (const auto& c : candidates) {
        if (c.passed_filters && c.provenance.size() >= 2) ++table[c.provenance];
    }
    return table;
}

std::array<std::size_t, 4> strategy_counts(const std::vector<Candidate>& candidates) {
    std::array<std::size_t, 4> counts{};
    for (const auto& c : candidates) {
        if (!c.passed_filters) continue;
        for (auto s : c.provenance.strategies()) ++counts[static_cast<std::size_t>(s)];
    }
    return counts;
}

std::array<std::size_t, 4> single_strategy_counts(const std::vector<Candidate>& candidates) {
    std::array<std::size_t, 4> counts{};
    for (const auto& c : candidates) {
        if (c.passed_filters && c.provenance.size() == 1)
            ++counts[static_cast<std::size_t>(c.provenance.strategies().front())];
    }
    return counts;
}

}  // namespace glsb
