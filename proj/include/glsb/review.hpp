#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "glsb/error.hpp"
#include "glsb/linkgraph.hpp"

namespace glsb::review {

struct ScreeningQuestion {
    std::string id;  // "Q1"
    std::string text;
};

struct ExclusionRule {
    std::string id;  // "R1"
    std::string summary;
};

/// What reviewers answer per discussion. The first question is the coded
/// one: its answers must come from td_type_vocabulary and decide agreement.
struct LabelSchema {
    std::vector<ScreeningQuestion> questions;
    std::vector<std::string> td_type_vocabulary;
    std::vector<ExclusionRule> exclusion_rules;

    static LabelSchema default_schema();
    void validate() const;
    const std::string& coded_question() const { return questions.front().id; }
    bool has_rule(std::string_view id) const;
    bool has_question(std::string_view id) const;
};

enum class Verdict { Valid, FalsePositive };
std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view text);

using Codes = std::map<std::string, std::vector<std::string>>;  // question id -> codes

struct Label {
    PostId discussion_id = 0;
    std::string reviewer;
    Verdict verdict = Verdict::Valid;
    std::optional<std::string> triggered_rule;
    Codes codes;
    std::string notes;
    std::string created_at;

    bool operator==(const Label&) const = default;
};

struct FieldError {
    std::string field;
    std::string message;
};

/// Schema check for one label; empty when the label is acceptable.
std::vector<FieldError> validate_label(const Label& label, const LabelSchema& schema);

/// Thrown by submit when validate_label reports problems.
class LabelRejected : public Error {
public:
    explicit LabelRejected(std::vector<FieldError> errors);
    const std::vector<FieldError>& errors() const { return errors_; }

private:
    std::vector<FieldError> errors_;
};

enum class ConsensusStatus { Pending, Agreed, Conflict, Resolved };
std::string_view to_string(ConsensusStatus s);

struct ConsensusState {
    PostId discussion_id = 0;
    ConsensusStatus status = ConsensusStatus::Pending;
    std::optional<Verdict> verdict;
    std::vector<std::string> reviewers;  // sorted
    Codes codes;                          // merged final codes, sorted, when decided

    bool decided() const {
        return status == ConsensusStatus::Agreed || status == ConsensusStatus::Resolved;
    }
    bool operator==(const ConsensusState&) const = default;
};

/// Consensus over the current label of each reviewer:
///   0-1 labels     pending
///   2 labels       agreed when verdict and coded-question set match, else conflict
///   3+ labels      resolved by strict majority verdict (codes = union of the
///                  majority side); an even split stays in conflict
ConsensusState compute_consensus(PostId discussion, std::span<const Label> labels,
                                 const LabelSchema& schema);

struct CodeMerge {
    std::string question;
    std::string from;
    std::string to;
};

struct Milestone {
    std::string name;  // e.g. "saturation"
    std::string note;
};

struct LogEntry {
    std::uint64_t seq = 0;
    std::optional<std::string> request_token;
    std::string recorded_at;
    std::optional<Label> label;
    std::optional<CodeMerge> merge;
    std::optional<Milestone> milestone;
};

void to_json(nlohmann::json& j, const Label& l);
void from_json(const nlohmann::json& j, Label& l);
void to_json(nlohmann::json& j, const ConsensusState& s);
void to_json(nlohmann::json& j, const LogEntry& e);
void from_json(const nlohmann::json& j, LogEntry& e);
void to_json(nlohmann::json& j, const LabelSchema& s);
void from_json(const nlohmann::json& j, LabelSchema& s);

/// Append-only audit log with the consensus states it implies. When backed
/// by a file, entries are flushed and synced before submit returns.
class ReviewLog {
public:
    explicit ReviewLog(LabelSchema schema, std::optional<std::filesystem::path> file = {});

    const LabelSchema& schema() const { return schema_; }
    const std::vector<LogEntry>& entries() const { return entries_; }

    /// Validates, appends and returns the discussion's new consensus.
    /// `known` lists the discussions open for labeling. A repeated request
    /// token returns the recorded outcome without appending.
    ConsensusState submit(Label label, const IdSet& known,
                          const std::optional<std::string>& request_token = {},
                          const std::string& now = {});

    /// Renames a code for a non-coded question; later states see `to`.
    void merge_codes(CodeMerge merge, const std::optional<std::string>& request_token = {},
                     const std::string& now = {});
    void mark_milestone(Milestone milestone, const std::optional<std::string>& request_token = {},
                        const std::string& now = {});

    const LogEntry* find_token(std::string_view token) const;

    ConsensusState consensus(PostId discussion) const;
    /// Current labels per discussion (latest per reviewer).
    std::vector<Label> labels_for(PostId discussion) const;
    std::vector<Milestone> milestones() const;

    /// Last recorded_at in the log, empty for an empty log.
    std::string last_recorded_at() const;

    /// Serialized log, one entry per line.
    std::string export_log() const;
    /// Replays exported lines into a fresh in-memory log.
    static ReviewLog replay(const LabelSchema& schema, std::string_view exported);

private:
    void apply(LogEntry entry);
    void append_to_file(const LogEntry& entry);
    std::string map_code(const std::string& question, const std::string& code) const;

    LabelSchema schema_;
    std::optional<std::filesystem::path> file_;
    std::vector<LogEntry> entries_;
    std::map<PostId, std::map<std::string, Label>> current_;  // discussion -> reviewer -> label
    std::map<std::string, std::map<std::string, std::string>> renames_;  // question -> from -> to
};

/// Discussions still needing a label from `reviewer`, in tiers: conflicts,
/// then pending discussions already labeled by someone else, then untouched
/// ones; ascending id within a tier.
std::vector<PostId> screening_queue(const ReviewLog& log, const IdSet& discussions,
                                    std::string_view reviewer);

/// Discussions whose consensus is decided with verdict valid.
IdSet valid_set(const ReviewLog& log, const IdSet& discussions);

/// Discussions that are not yet decided.
IdSet undecided(const ReviewLog& log, const IdSet& discussions);

}  // namespace glsb::review
