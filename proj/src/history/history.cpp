#include "cdd/history/history.hpp"

#include "cdd/engine/analyze.hpp"
#include "cdd/parallel.hpp"
#include "cdd/syntax/parser.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <regex>

namespace cdd::history {

using engine::RuleSet;

std::optional<CddCommit> detect_cdd_commit(std::string_view message, const RuleSet& rules) {
    // Patterns were validated by load_rules, but a RuleSet can be built by hand.
    std::regex pattern;
    try {
        pattern = std::regex(rules.commit_pattern, std::regex::ECMAScript);
    } catch (const std::regex_error&) {
        return std::nullopt;
    }
    std::string first(message.substr(0, message.find('\n')));
    if (!first.empty() && first.back() == '\r') first.pop_back();
    std::smatch m;
    if (!std::regex_search(first, m, pattern)) return std::nullopt;
    CddCommit c;
    c.unit = m.size() > 1 ? m[1].str() : m[0].str();
    if (m.size() > 2) c.description = m[2].str();
    return c;
}

namespace {

struct ParsedFile {
    std::optional<syntax::SourceUnit> unit;
    std::string failure;
};

} // namespace

SnapshotAnalysis analyze_snapshot(const std::vector<SnapshotFile>& files, const RuleSet& rules, unsigned workers) {
    std::vector<ParsedFile> parsed(files.size());
    parallel_for(
        files.size(),
        [&](std::size_t i) {
            try {
                parsed[i].unit = syntax::parse_unit(files[i].text, files[i].path);
            } catch (const syntax::ParseError& e) {
                parsed[i].failure = e.what();
            }
        },
        workers);

    SnapshotAnalysis out;
    std::vector<syntax::SourceUnit> units;
    double loc_sum = 0, icp_sum = 0;
    std::size_t over = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!parsed[i].unit) {
            ++out.parse_failures;
            out.diagnostics.push_back(fmt::format("{}: {}", files[i].path, parsed[i].failure));
            continue;
        }
        ++out.files_analyzed;
        const syntax::SourceUnit& unit = *parsed[i].unit;
        if (!files[i].is_test) {
            for (const auto& a : engine::analyze_unit(unit, rules)) {
                bool whole_file = unit.types.size() == 1 && a.type_name == unit.types.front().name;
                loc_sum += whole_file ? unit.physical_lines : a.type_span.line_count();
                icp_sum += a.total.to_double();
                if (engine::verdict(a, rules).over_limit) ++over;
                ++out.class_count;
            }
        }
        units.push_back(std::move(*parsed[i].unit));
    }
    if (out.class_count) {
        double n = static_cast<double>(out.class_count);
        out.mean_loc = loc_sum / n;
        out.mean_icp = icp_sum / n;
        out.percent_over_limit = 100.0 * static_cast<double>(over) / n;
    }
    out.method_stats = engine::method_stats(units, rules);
    return out;
}

SeriesReport series(SnapshotProvider& provider, const RangeSpec& range, const RuleSet& rules, unsigned workers) {
    std::vector<CommitMeta> commits = list_snapshots(provider, range);
    SeriesReport report;
    report.rules_digest = engine::rules_digest(rules);
    report.parameters["mode"] = std::string(provider.mode());
    report.parameters["range"] = range.to_string();
    report.snapshots.resize(commits.size());
    parallel_for(
        commits.size(),
        [&](std::size_t i) {
            SnapshotMetrics& m = report.snapshots[i];
            m.commit = commits[i];
            m.cdd_commit = detect_cdd_commit(commits[i].message, rules);
            try {
                SnapshotFiles files = read_snapshot_files(provider, commits[i], rules);
                m.analysis = analyze_snapshot(files.files, rules, 1);
                m.analysis.diagnostics.insert(m.analysis.diagnostics.begin(), files.diagnostics.begin(),
                                              files.diagnostics.end());
            } catch (const std::exception& e) {
                m.error = e.what();
            }
        },
        workers);
    bool any_ok = std::any_of(report.snapshots.begin(), report.snapshots.end(),
                              [](const SnapshotMetrics& m) { return !m.error; });
    if (!any_ok)
        throw SeriesFailed(fmt::format("all {} snapshots failed; first error: {}", report.snapshots.size(),
                                       *report.snapshots.front().error));
    return report;
}

namespace {

std::string fixed2(const std::optional<double>& v) { return v ? fmt::format("{:.2f}", *v) : ""; }

template <class T>
std::string integer(const std::optional<T>& v) {
    return v ? fmt::format("{}", *v) : "";
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

nlohmann::json optional_number(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nullptr; }

} // namespace

std::string series_csv(const SeriesReport& report) {
    std::string out = "ordinal,commit_id,timestamp,class_count,mean_loc,mean_icp,percent_over_limit,cdd_commit,"
                      "methods_counted,method_mean_loc,method_p50,method_max,pct_methods_le_24\n";
    for (const auto& s : report.snapshots) {
        const auto& a = s.analysis;
        const auto& ms = a.method_stats;
        bool ok = !s.error;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.commit.ordinal, csv_field(s.commit.id),
                           csv_field(s.commit.timestamp), ok ? std::to_string(a.class_count) : "",
                           fixed2(a.mean_loc), fixed2(a.mean_icp), fixed2(a.percent_over_limit),
                           s.cdd_commit ? 1 : 0, ok ? std::to_string(ms.counted_methods) : "", fixed2(ms.mean),
                           fixed2(ms.median), integer(ms.max), fixed2(ms.percent_at_or_under_24));
    }
    return out;
}

std::string series_json(const SeriesReport& report) {
    nlohmann::json doc;
    doc["schema_version"] = kSeriesSchemaVersion;
    doc["kind"] = "series";
    doc["rules_digest"] = report.rules_digest;
    doc["parameters"] = report.parameters;
    doc["snapshots"] = nlohmann::json::array();
    for (const auto& s : report.snapshots) {
        const auto& a = s.analysis;
        const auto& ms = a.method_stats;
        nlohmann::json j;
        j["ordinal"] = s.commit.ordinal;
        j["commit_id"] = s.commit.id;
        j["timestamp"] = s.commit.timestamp;
        j["message"] = s.commit.message;
        j["cdd_commit"] = s.cdd_commit ? nlohmann::json{{"unit", s.cdd_commit->unit},
                                                        {"description", s.cdd_commit->description}}
                                       : nlohmann::json(nullptr);
        j["error"] = s.error ? nlohmann::json(*s.error) : nlohmann::json(nullptr);
        j["class_count"] = a.class_count;
        j["mean_loc"] = optional_number(a.mean_loc);
        j["mean_icp"] = optional_number(a.mean_icp);
        j["percent_over_limit"] = optional_number(a.percent_over_limit);
        j["files_analyzed"] = a.files_analyzed;
        j["parse_failures"] = a.parse_failures;
        j["diagnostics"] = a.diagnostics;
        j["method_stats"] = {
            {"counted", ms.counted_methods},
            {"excluded", ms.excluded_methods},
            {"mean_loc", optional_number(ms.mean)},
            {"p50", optional_number(ms.median)},
            {"max", ms.max ? nlohmann::json(*ms.max) : nlohmann::json(nullptr)},
            {"stddev", optional_number(ms.stddev)},
            {"pct_le_24", optional_number(ms.percent_at_or_under_24)},
        };
        doc["snapshots"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

} // namespace cdd::history
