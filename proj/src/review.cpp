#include "glsb/review.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "glsb/clock.hpp"

namespace glsb::review {

using nlohmann::json;

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::string join_fields(const std::vector<FieldError>& errors) {
    std::string out = "label rejected:";
    for (const auto& e : errors) out += " " + e.field + ": " + e.message + ";";
    return out;
}

}  // namespace

LabelSchema LabelSchema::default_schema() {
    LabelSchema s;
    s.questions = {
        {"Q1", "Which technical debt types does the discussion address?"},
        {"Q2", "Which technical debt indicators are reported?"},
        {"Q3", "Which management or identification practices are recommended?"},
    };
    s.td_type_vocabulary = {"architecture",   "build",    "code",         "defect",
                            "design",         "documentation", "infrastructure", "people",
                            "process",        "requirements",  "service",    "test",
                            "test_automation", "usability",    "versioning"};
    s.exclusion_rules = {
        {"R1", "not about technical debt"},
        {"R2", "no real situation described"},
        {"R3", "indicators not stated by the question author"},
        {"R4", "practices not endorsed by another user"},
    };
    return s;
}

void LabelSchema::validate() const {
    if (questions.empty()) throw Error(ErrorCode::InvalidArgument, "schema needs questions");
    if (td_type_vocabulary.empty())
        throw Error(ErrorCode::InvalidArgument, "schema needs a TD type vocabulary");
    if (exclusion_rules.empty()) throw Error(ErrorCode::InvalidArgument, "schema needs rules");
    std::set<std::string> ids;
    for (const auto& r : exclusion_rules) {
        if (!ids.insert(r.id).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate rule id " + r.id);
    }
    std::set<std::string> qids;
    for (const auto& q : questions) {
        if (!qids.insert(q.id).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate question id " + q.id);
    }
}

bool LabelSchema::has_rule(std::string_view id) const {
    return std::any_of(exclusion_rules.begin(), exclusion_rules.end(),
                       [&](const ExclusionRule& r) { return r.id == id; });
}

bool LabelSchema::has_question(std::string_view id) const {
    return std::any_of(questions.begin(), questions.end(),
                       [&](const ScreeningQuestion& q) { return q.id == id; });
}

std::string_view to_string(Verdict v) { return v == Verdict::Valid ? "valid" : "false_positive"; }

Verdict verdict_from_string(std::string_view text) {
    if (text == "valid") return Verdict::Valid;
    if (text == "false_positive") return Verdict::FalsePositive;
    throw Error(ErrorCode::InvalidArgument, "unknown verdict: " + std::string(text));
}

std::string_view to_string(ConsensusStatus s) {
    switch (s) {
        case ConsensusStatus::Pending: return "pending";
        case ConsensusStatus::Agreed: return "agreed";
        case ConsensusStatus::Conflict: return "conflict";
        case ConsensusStatus::Resolved: return "resolved";
    }
    return "unknown";
}

LabelRejected::LabelRejected(std::vector<FieldError> errors)
    : Error(ErrorCode::SchemaViolation, join_fields(errors)), errors_(std::move(errors)) {}

std::vector<FieldError> validate_label(const Label& label, const LabelSchema& schema) {
    std::vector<FieldError> errors;
    if (label.reviewer.empty()) errors.push_back({"reviewer", "reviewer id is required"});
    if (label.verdict == Verdict::FalsePositive) {
        if (!label.triggered_rule) {
            errors.push_back({"triggered_rule", "a false positive must name the rule it breaks"});
        } else if (!schema.has_rule(*label.triggered_rule)) {
            errors.push_back({"triggered_rule", "unknown rule " + *label.triggered_rule});
        }
    } else if (label.triggered_rule) {
        errors.push_back({"triggered_rule", "only false positives carry a rule"});
    }
    for (const auto& [question, codes] : label.codes) {
        if (!schema.has_question(question)) {
            errors.push_back({"codes." + question, "unknown question"});
            continue;
        }
        if (question != schema.coded_question()) continue;
        for (const auto& code : codes) {
            const auto& vocab = schema.td_type_vocabulary;
            if (std::find(vocab.begin(), vocab.end(), code) == vocab.end())
                errors.push_back({"codes." + question, "code not in vocabulary: " + code});
        }
    }
    if (label.verdict == Verdict::Valid) {
        auto it = label.codes.find(schema.coded_question());
        if (it == label.codes.end() || it->second.empty())
            errors.push_back({"codes." + schema.coded_question(),
                              "a valid discussion needs at least one code"});
    }
    return errors;
}

ConsensusState compute_consensus(PostId discussion, std::span<const Label> labels,
                                 const LabelSchema& schema) {
    ConsensusState state;
    state.discussion_id = discussion;
    for (const auto& l : labels) state.reviewers.push_back(l.reviewer);
    std::sort(state.reviewers.begin(), state.reviewers.end());

    auto coded = [&](const Label& l) {
        auto it = l.codes.find(schema.coded_question());
        return it == l.codes.end() ? std::vector<std::string>{} : sorted_unique(it->second);
    };
    auto union_codes = [&](Verdict side) {
        Codes merged;
        for (const auto& l : labels) {
            if (l.verdict != side) continue;
            for (const auto& [q, codes] : l.codes) {
                auto& dst = merged[q];
                dst.insert(dst.end(), codes.begin(), codes.end());
            }
        }
        for (auto& [q, codes] : merged) codes = sorted_unique(codes);
        return merged;
    };

    if (labels.size() < 2) return state;
    if (labels.size() == 2) {
        const auto& a = labels[0];
        const auto& b = labels[1];
        if (a.verdict == b.verdict && coded(a) == coded(b)) {
            state.status = ConsensusStatus::Agreed;
            state.verdict = a.verdict;
            state.codes = union_codes(a.verdict);
        } else {
            state.status = ConsensusStatus::Conflict;
        }
        return state;
    }
    const auto valid = std::count_if(labels.begin(), labels.end(),
                                     [](const Label& l) { return l.verdict == Verdict::Valid; });
    const auto invalid = static_cast<std::ptrdiff_t>(labels.size()) - valid;
    if (valid == invalid) {
        state.status = ConsensusStatus::Conflict;
        return state;
    }
    state.status = ConsensusStatus::Resolved;
    state.verdict = valid > invalid ? Verdict::Valid : Verdict::FalsePositive;
    state.codes = union_codes(*state.verdict);
    return state;
}

void to_json(json& j, const Label& l) {
    j = {{"discussion_id", l.discussion_id},
         {"reviewer", l.reviewer},
         {"verdict", to_string(l.verdict)},
         {"triggered_rule", l.triggered_rule ? json(*l.triggered_rule) : json(nullptr)},
         {"codes", l.codes},
         {"notes", l.notes},
         {"created_at", l.created_at}};
}

void from_json(const json& j, Label& l) {
    l.discussion_id = j.at("discussion_id").get<PostId>();
    l.reviewer = j.at("reviewer").get<std::string>();
    l.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    auto rule = j.find("triggered_rule");
    l.triggered_rule = (rule == j.end() || rule->is_null()) ? std::nullopt
                                                            : std::optional(rule->get<std::string>());
    l.codes = j.value("codes", Codes{});
    l.notes = j.value("notes", "");
    l.created_at = j.value("created_at", "");
}

void to_json(json& j, const ConsensusState& s) {
    j = {{"discussion_id", s.discussion_id},
         {"status", to_string(s.status)},
         {"verdict", s.verdict ? json(to_string(*s.verdict)) : json(nullptr)},
         {"reviewers", s.reviewers},
         {"codes", s.codes}};
}

void to_json(json& j, const LogEntry& e) {
    j = {{"seq", e.seq},
         {"request_token", e.request_token ? json(*e.request_token) : json(nullptr)},
         {"recorded_at", e.recorded_at}};
    if (e.label) {
        j["kind"] = "label";
        j["label"] = *e.label;
    } else if (e.merge) {
        j["kind"] = "code_merge";
        j["merge"] = {{"question", e.merge->question}, {"from", e.merge->from}, {"to", e.merge->to}};
    } else if (e.milestone) {
        j["kind"] = "milestone";
        j["milestone"] = {{"name", e.milestone->name}, {"note", e.milestone->note}};
    }
}

void from_json(const json& j, LogEntry& e) {
    e.seq = j.at("seq").get<std::uint64_t>();
    const auto& token = j.at("request_token");
    e.request_token = token.is_null() ? std::nullopt : std::optional(token.get<std::string>());
    e.recorded_at = j.value("recorded_at", "");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "label") {
        e.label = j.at("label").get<Label>();
    } else if (kind == "code_merge") {
        const auto& m = j.at("merge");
        e.merge = CodeMerge{m.at("question"), m.at("from"), m.at("to")};
    } else if (kind == "milestone") {
        const auto& m = j.at("milestone");
        e.milestone = Milestone{m.at("name"), m.value("note", "")};
    } else {
        throw Error(ErrorCode::ParseError, "unknown log entry kind: " + kind);
    }
}

void to_json(json& j, const LabelSchema& s) {
    json questions = json::array();
    for (const auto& q : s.questions) questions.push_back({{"id", q.id}, {"text", q.text}});
    json rules = json::array();
    for (const auto& r : s.exclusion_rules) rules.push_back({{"id", r.id}, {"summary", r.summary}});
    j = {{"questions", questions}, {"td_type_vocabulary", s.td_type_vocabulary}, {"exclusion_rules", rules}};
}

void from_json(const json& j, LabelSchema& s) {
    s.questions.clear();
    for (const auto& q : j.at("questions")) s.questions.push_back({q.at("id"), q.value("text", "")});
    s.td_type_vocabulary = j.at("td_type_vocabulary").get<std::vector<std::string>>();
    s.exclusion_rules.clear();
    for (const auto& r : j.at("exclusion_rules"))
        s.exclusion_rules.push_back({r.at("id"), r.value("summary", "")});
    s.validate();
}

ReviewLog::ReviewLog(LabelSchema schema, std::optional<std::filesystem::path> file)
    : schema_(std::move(schema)), file_(std::move(file)) {
    schema_.validate();
    if (file_ && std::filesystem::exists(*file_)) {
        std::ifstream in(*file_);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            apply(json::parse(line).get<LogEntry>());
        }
    }
}

const LogEntry* ReviewLog::find_token(std::string_view token) const {
    for (const auto& e : entries_) {
        if (e.request_token && *e.request_token == token) return &e;
    }
    return nullptr;
}

ConsensusState ReviewLog::submit(Label label, const IdSet& known,
                                 const std::optional<std::string>& request_token,
                                 const std::string& now) {
    if (request_token) {
        if (const auto* prior = find_token(*request_token); prior && prior->label)
            return consensus(prior->label->discussion_id);
    }
    auto errors = validate_label(label, schema_);
    if (!errors.empty()) throw LabelRejected(std::move(errors));
    if (known.count(label.discussion_id) == 0)
        throw Error(ErrorCode::NotFound, "unknown discussion " + std::to_string(label.discussion_id));
    for (auto& [q, codes] : label.codes) codes = sorted_unique(std::move(codes));

    LogEntry entry;
    entry.seq = entries_.size() + 1;
    entry.request_token = request_token;
    entry.recorded_at = now.empty() ? utc_now_iso() : now;
    if (label.created_at.empty()) label.created_at = entry.recorded_at;
    const auto id = label.discussion_id;
    entry.label = std::move(label);
    append_to_file(entry);
    apply(std::move(entry));
    return consensus(id);
}

void ReviewLog::merge_codes(CodeMerge merge, const std::optional<std::string>& request_token,
                            const std::string& now) {
    if (request_token && find_token(*request_token)) return;
    if (!schema_.has_question(merge.question))
        throw Error(ErrorCode::InvalidArgument, "unknown question " + merge.question);
    if (merge.question == schema_.coded_question())
        throw Error(ErrorCode::InvalidArgument, "codes of " + merge.question + " come from the vocabulary");
    if (merge.from == merge.to || map_code(merge.question, merge.to) == merge.from)
        throw Error(ErrorCode::InvalidArgument, "code merge would create a cycle");
    LogEntry entry;
    entry.seq = entries_.size() + 1;
    entry.request_token = request_token;
    entry.recorded_at = now.empty() ? utc_now_iso() : now;
    entry.merge = std::move(merge);
    append_to_file(entry);
    apply(std::move(entry));
}

void ReviewLog::mark_milestone(Milestone milestone, const std::optional<std::string>& request_token,
                               const std::string& now) {
    if (request_token && find_token(*request_token)) return;
    LogEntry entry;
    entry.seq = entries_.size() + 1;
    entry.request_token = request_token;
    entry.recorded_at = now.empty() ? utc_now_iso() : now;
    entry.milestone = std::move(milestone);
    append_to_file(entry);
    apply(std::move(entry));
}

void ReviewLog::apply(LogEntry entry) {
    if (entry.label) {
        current_[entry.label->discussion_id][entry.label->reviewer] = *entry.label;
    } else if (entry.merge) {
        renames_[entry.merge->question][entry.merge->from] = entry.merge->to;
    }
    entries_.push_back(std::move(entry));
}

void ReviewLog::append_to_file(const LogEntry& entry) {
    if (!file_) return;
    const auto line = json(entry).dump() + "\n";
    std::FILE* f = std::fopen(file_->c_str(), "ab");
    if (f == nullptr) throw Error(ErrorCode::Io, "cannot open label log " + file_->string());
    const bool ok = std::fwrite(line.data(), 1, line.size(), f) == line.size() &&
                    std::fflush(f) == 0 && ::fsync(fileno(f)) == 0;
    std::fclose(f);
    if (!ok) throw Error(ErrorCode::Io, "failed to append to label log " + file_->string());
}

std::string ReviewLog::map_code(const std::string& question, const std::string& code) const {
    auto q = renames_.find(question);
    if (q == renames_.end()) return code;
    std::string current = code;
    for (std::size_t guard = 0; guard <= q->second.size(); ++guard) {
        auto it = q->second.find(current);
        if (it == q->second.end()) break;
        current = it->second;
    }
    return current;
}

std::vector<Label> ReviewLog::labels_for(PostId discussion) const {
    std::vector<Label> out;
    auto it = current_.find(discussion);
    if (it == current_.end()) return out;
    for (const auto& [reviewer, label] : it->second) {
        Label l = label;
        for (auto& [q, codes] : l.codes) {
            for (auto& c : codes) c = map_code(q, c);
            codes = sorted_unique(std::move(codes));
        }
        out.push_back(std::move(l));
    }
    return out;
}

ConsensusState ReviewLog::consensus(PostId discussion) const {
    const auto labels = labels_for(discussion);
    return compute_consensus(discussion, labels, schema_);
}

std::vector<Milestone> ReviewLog::milestones() const {
    std::vector<Milestone> out;
    for (const auto& e : entries_) {
        if (e.milestone) out.push_back(*e.milestone);
    }
    return out;
}

std::string ReviewLog::last_recorded_at() const {
    return entries_.empty() ? std::string{} : entries_.back().recorded_at;
}

std::string ReviewLog::export_log() const {
    std::string out;
    for (const auto& e : entries_) out += json(e).dump() + "\n";
    return out;
}

ReviewLog ReviewLog::replay(const LabelSchema& schema, std::string_view exported) {
    ReviewLog log(schema);
    std::istringstream in{std::string(exported)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) log.apply(json::parse(line).get<LogEntry>());
    }
    return log;
}

std::vector<PostId> screening_queue(const ReviewLog& log, const IdSet& discussions,
                                    std::string_view reviewer) {
    std::vector<PostId> conflicts, pending, untouched;
    for (const auto id : discussions) {
        const auto state = log.consensus(id);
        if (state.decided()) continue;
        if (std::find(state.reviewers.begin(), state.reviewers.end(), reviewer) != state.reviewers.end())
            continue;
        if (state.status == ConsensusStatus::Conflict) {
            conflicts.push_back(id);
        } else if (!state.reviewers.empty()) {
            pending.push_back(id);
        } else {
            untouched.push_back(id);
        }
    }
    conflicts.insert(conflicts.end(), pending.begin(), pending.end());
    conflicts.insert(conflicts.end(), untouched.begin(), untouched.end());
    return conflicts;
}

IdSet valid_set(const ReviewLog& log, const IdSet& discussions) {
    IdSet out;
    for (const auto id : discussions) {
        const auto state = log.consensus(id);
        if (state.decided() && state.verdict == Verdict::Valid) out.insert(id);
    }
    return out;
}

IdSet undecided(const ReviewLog& log, const IdSet& discussions) {
    IdSet out;
    for (const auto id : discussions) {
        if (!log.consensus(id).decided()) out.insert(id);
    }
    return out;
}

}  // namespace glsb::review
