#include "glsb/metrics.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "glsb/error.hpp"

namespace glsb::metrics {

using nlohmann::json;

std::optional<Rational> precision(std::int64_t candidates, std::int64_t valid) {
    if (valid < 0 || candidates < 0 || valid > candidates)
        throw Error(ErrorCode::InvalidArgument, "precision needs 0 <= valid <= candidates");
    if (candidates == 0) return std::nullopt;
    return Rational(valid, candidates);
}

std::optional<Rational> combined_precision(
    std::span<const std::pair<std::int64_t, std::int64_t>> sources) {
    std::int64_t candidates = 0;
    std::int64_t valid = 0;
    for (const auto& [c, v] : sources) {
        precision(c, v);  // validates the pair
        candidates += c;
        valid += v;
    }
    return precision(candidates, valid);
}

std::optional<Rational> recall_gain(std::int64_t start_valid, std::int64_t new_valid) {
    if (start_valid < 0 || new_valid < 0)
        throw Error(ErrorCode::InvalidArgument, "recall gain needs non-negative counts");
    if (start_valid == 0) return std::nullopt;
    return Rational(new_valid, start_valid);
}

const SourceMetrics& MetricsReport::source(std::string_view name) const {
    for (const auto& s : sources) {
        if (s.name == name) return s;
    }
    throw Error(ErrorCode::NotFound, "no source " + std::string(name) + " in report");
}

MetricsReport build_report(const ReportInputs& in) {
    MetricsReport r;
    r.generated_at = in.generated_at;

    auto add_source = [&](std::string name, std::string display, std::int64_t c, std::int64_t v) {
        r.sources.push_back({std::move(name), std::move(display), c, v, precision(c, v)});
    };

    std::int64_t search_valid = 0;
    for (const auto id : in.search_valid) search_valid += in.search_candidates.count(id);
    add_source("search", "Search", static_cast<std::int64_t>(in.search_candidates.size()), search_valid);

    std::array<std::int64_t, 4> cand{};
    std::array<std::int64_t, 4> valid{};
    std::int64_t unique = 0;
    std::int64_t unique_valid = 0;
    for (const auto& c : in.snowball_candidates) {
        if (!c.passed_filters) continue;
        const bool is_valid = in.snowball_valid.count(c.id) != 0;
        ++unique;
        unique_valid += is_valid ? 1 : 0;
        for (auto s : c.provenance.strategies()) {
            ++cand[static_cast<std::size_t>(s)];
            valid[static_cast<std::size_t>(s)] += is_valid ? 1 : 0;
        }
    }
    for (auto s : kStrategies) {
        const auto i = static_cast<std::size_t>(s);
        add_source(std::string(to_string(s)), std::string(display_name(s)), cand[i], valid[i]);
    }
    add_source("AllSB", "All snowballing", unique, unique_valid);

    auto group = [&](std::string name, std::string display, std::vector<std::string> members) {
        std::vector<std::pair<std::int64_t, std::int64_t>> parts;
        for (const auto& m : members) {
            const auto& s = r.source(m);
            parts.emplace_back(s.candidates, s.valid);
        }
        r.groups.push_back({std::move(name), std::move(display), members, combined_precision(parts)});
    };
    group("LinkedSB", "Linked SB overall", {"LinkedBSB", "LinkedFSB"});
    group("RelatedSB", "Related SB overall", {"RelatedBSB", "RelatedFSB"});
    group("Combined", "Search + snowballing combined", {"AllSB", "search"});
    r.combined_precision = r.groups.back().precision;

    r.start_valid = search_valid;
    r.new_valid = unique_valid;
    r.recall_gain = recall_gain(search_valid, unique_valid);
    r.overlap = overlap_table(in.snowball_candidates);
    r.top_cited = in.top_cited;
    return r;
}

ReportFormat report_format_from_string(std::string_view text) {
    if (text == "structured" || text == "jsonl") return ReportFormat::Structured;
    if (text == "table" || text == "markdown") return ReportFormat::Table;
    throw Error(ErrorCode::InvalidArgument, "unknown report format: " + std::string(text));
}

namespace {

json rational_json(const std::optional<Rational>& r) {
    if (!r) return nullptr;
    return {{"num", r->num()},
            {"den", r->den()},
            {"percent", r->percent_rounded()},
            {"percent_1dp", r->percent_one_decimal()}};
}

std::string percent_text(const std::optional<Rational>& r) {
    if (!r) return "n/a";
    return std::to_string(r->percent_rounded()) + "% (" + r->percent_one_decimal() + "%)";
}

std::vector<std::pair<Provenance, std::size_t>> ordered_overlap(const MetricsReport& report) {
    std::vector<std::pair<Provenance, std::size_t>> rows(report.overlap.begin(), report.overlap.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
        return a.first.display_label() < b.first.display_label();
    });
    return rows;
}

std::string emit_structured(const MetricsReport& r) {
    std::string out;
    auto line = [&](const json& j) { out += j.dump() + "\n"; };
    line({{"record", "meta"}, {"generated_at", r.generated_at}});
    for (const auto& s : r.sources) {
        line({{"record", "source"},
              {"source", s.name},
              {"candidates", s.candidates},
              {"valid", s.valid},
              {"precision", rational_json(s.precision)}});
    }
    for (const auto& g : r.groups) {
        line({{"record", "group"},
              {"group", g.name},
              {"members", g.members},
              {"precision", rational_json(g.precision)}});
    }
    line({{"record", "combined_precision"}, {"value", rational_json(r.combined_precision)}});
    line({{"record", "relative_recall_gain"},
          {"start_valid", r.start_valid},
          {"new_valid", r.new_valid},
          {"value", rational_json(r.recall_gain)}});
    for (const auto& [prov, count] : ordered_overlap(r)) {
        line({{"record", "overlap"},
              {"combination", prov.short_label()},
              {"label", prov.display_label()},
              {"count", count}});
    }
    std::size_t rank = 0;
    for (const auto& [id, c] : r.top_cited) {
        line({{"record", "top_cited"},
              {"rank", ++rank},
              {"discussion_id", id},
              {"linked_in", c.linked_in},
              {"related_in", c.related_in},
              {"total", c.total}});
    }
    return out;
}

std::string emit_table(const MetricsReport& r) {
    std::ostringstream out;
    out << "# Snowballing report\n\n";
    out << "Generated at: " << (r.generated_at.empty() ? "n/a" : r.generated_at) << "\n\n";

    out << "## Precision by source\n\n";
    for (const auto& s : r.sources) {
        out << "- **" << s.display << ":** " << s.candidates << " candidate discussions and "
            << s.valid << " valid";
        if (s.precision) {
            out << ", i.e. precision = " << s.valid << " / " << s.candidates << " = "
                << percent_text(s.precision);
        } else {
            out << ", precision n/a";
        }
        out << ".\n";
    }
    out << '\n';
    for (const auto& g : r.groups) {
        std::string nums, dens;
        for (const auto& m : g.members) {
            const auto& s = r.source(m);
            nums += (nums.empty() ? "" : " + ") + std::to_string(s.valid);
            dens += (dens.empty() ? "" : " + ") + std::to_string(s.candidates);
        }
        out << "- **" << g.display << ":** (" << nums << ") / (" << dens << ") = "
            << percent_text(g.precision) << "\n";
    }
    out << "- **Relative recall gain:** " << r.new_valid << " / " << r.start_valid << " = "
        << percent_text(r.recall_gain) << "\n\n";

    out << "## Duplicated discussions among snowballings\n\n";
    out << "| SB combination | # of duplicated discussions |\n";
    out << "|---|---|\n";
    std::size_t total = 0;
    for (const auto& [prov, count] : ordered_overlap(r)) {
        out << "| " << prov.display_label() << " | " << count << " |\n";
        total += count;
    }
    out << "| **Total** | " << total << " |\n\n";

    out << "## Most cited discussions\n\n";
    out << "| Rank | Discussion | Linked | Related | Total |\n";
    out << "|---|---|---|---|---|\n";
    std::size_t rank = 0;
    for (const auto& [id, c] : r.top_cited) {
        out << "| " << ++rank << " | " << id << " | " << c.linked_in << " | " << c.related_in
            << " | " << c.total << " |\n";
    }
    return out.str();
}

}  // namespace

std::string emit_report(const MetricsReport& report, ReportFormat format) {
    return format == ReportFormat::Structured ? emit_structured(report) : emit_table(report);
}

}  // namespace glsb::metrics
