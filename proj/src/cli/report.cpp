#include "cdd/cli/report.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <json.hpp>

namespace cdd::cli {

using annotations::DriftStatus;
using engine::Category;
using nlohmann::json;

std::size_t CheckReport::over_limit_count() const {
    return static_cast<std::size_t>(
        std::count_if(units.begin(), units.end(), [](const UnitReport& u) { return u.verdict.over_limit; }));
}

std::size_t CheckReport::drifted_count() const {
    return static_cast<std::size_t>(std::count_if(
        units.begin(), units.end(), [](const UnitReport& u) { return u.drift.status == DriftStatus::Drifted; }));
}

std::size_t CheckReport::unannotated_count() const {
    return static_cast<std::size_t>(std::count_if(units.begin(), units.end(), [](const UnitReport& u) {
        return u.drift.status == DriftStatus::Unannotated;
    }));
}

std::vector<Category> top_categories(const engine::UnitAnalysis& analysis, std::size_t n) {
    std::vector<Category> cats;
    for (Category c : engine::kAllCategories)
        if (analysis.subtotal(c) > Points{}) cats.push_back(c);
    std::stable_sort(cats.begin(), cats.end(),
                     [&](Category a, Category b) { return analysis.subtotal(a) > analysis.subtotal(b); });
    if (cats.size() > n) cats.resize(n);
    return cats;
}

namespace {

json points(const Points& p) {
    if (p.is_whole()) return p.halves() / 2;
    return p.to_double();
}

json optional_points(const std::optional<Points>& p) { return p ? points(*p) : json(nullptr); }

std::string signed_points(const Points& p) { return p >= Points{} ? "+" + p.to_string() : p.to_string(); }

json problems(const std::vector<FileProblem>& list) {
    json out = json::array();
    for (const auto& p : list) out.push_back({{"path", p.path}, {"message", p.message}});
    return out;
}

json subtotals(const engine::UnitAnalysis& a) {
    json out = json::object();
    for (Category c : engine::kAllCategories) out[std::string(engine::to_string(c))] = points(a.subtotal(c));
    return out;
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

} // namespace

std::string check_text(const CheckReport& report) {
    std::string out;
    for (const auto& u : report.units) {
        if (!u.verdict.over_limit) continue;
        std::string cats;
        for (Category c : top_categories(u.analysis)) {
            if (!cats.empty()) cats += ", ";
            cats += fmt::format("{} {}", engine::to_string(c), u.analysis.subtotal(c).to_string());
        }
        out += fmt::format("{}:{}: {} total {} exceeds limit {} ({})\n", u.analysis.path,
                           u.analysis.type_span.line_start, u.analysis.type_name, u.analysis.total.to_string(),
                           u.verdict.applicable_limit.to_string(), cats);
    }
    out += fmt::format("{} units in {} files, {} over limit, {} parse failures\n", report.units.size(),
                       report.files, report.over_limit_count(), report.parse_failures.size());
    return out;
}

std::string check_json(const CheckReport& report) {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["kind"] = "check";
    doc["units"] = json::array();
    for (const auto& u : report.units) {
        const auto& a = u.analysis;
        json sites = json::array();
        for (const auto& s : a.sites)
            sites.push_back({{"category", engine::to_string(s.category)},
                             {"cost", points(s.cost)},
                             {"line", s.span.line_start},
                             {"reason", s.reason}});
        doc["units"].push_back({
            {"path", a.path},
            {"type", a.type_name},
            {"line", a.type_span.line_start},
            {"total", points(a.total)},
            {"subtotals", subtotals(a)},
            {"limit", points(u.verdict.applicable_limit)},
            {"over_limit", u.verdict.over_limit},
            {"declared_total", optional_points(u.drift.declared_total)},
            {"drift_status", annotations::to_string(u.drift.status)},
            {"sites", std::move(sites)},
        });
    }
    doc["summary"] = {
        {"files", report.files},
        {"units", report.units.size()},
        {"over_limit_count", report.over_limit_count()},
        {"drifted_count", report.drifted_count()},
        {"unannotated_count", report.unannotated_count()},
        {"parse_failures", report.parse_failures.size()},
    };
    doc["parse_failures"] = problems(report.parse_failures);
    doc["warnings"] = problems(report.warnings);
    return doc.dump(2) + "\n";
}

std::string check_csv(const CheckReport& report) {
    std::string out = "path,type,total,limit,over_limit";
    for (Category c : engine::kAllCategories) out += fmt::format(",{}", engine::to_string(c));
    out += ",declared_total,drift_status\n";
    for (const auto& u : report.units) {
        const auto& a = u.analysis;
        out += fmt::format("{},{},{},{},{}", csv_field(a.path), csv_field(a.type_name), a.total.to_string(),
                           u.verdict.applicable_limit.to_string(), u.verdict.over_limit ? 1 : 0);
        for (Category c : engine::kAllCategories) out += "," + a.subtotal(c).to_string();
        out += fmt::format(",{},{}\n", u.drift.declared_total ? u.drift.declared_total->to_string() : "",
                           annotations::to_string(u.drift.status));
    }
    return out;
}

std::string drift_text(const CheckReport& report, const FixOutcome* fix) {
    std::string out;
    if (fix) {
        for (const auto& f : fix->changed_files) out += fmt::format("fixed {}\n", f);
        for (const auto& c : fix->conflicts) out += fmt::format("conflict {}: {}\n", c.path, c.message);
        out += fmt::format("{} files changed, {} conflicts\n", fix->changed_files.size(), fix->conflicts.size());
        return out;
    }
    for (const auto& u : report.units) {
        const auto& d = u.drift;
        int line = static_cast<int>(u.analysis.type_span.line_start);
        if (d.status == DriftStatus::Drifted)
            out += fmt::format("{}:{}: {} declares {} but computes {} (delta {})\n", d.path, line, d.type_name,
                               d.declared_total->to_string(), d.computed_total.to_string(), signed_points(*d.delta));
        else if (d.status == DriftStatus::Unannotated)
            out += fmt::format("{}:{}: {} has no @ICP (computes {})\n", d.path, line, d.type_name,
                               d.computed_total.to_string());
        for (const auto& m : d.site_mismatches)
            out += fmt::format("{}:{}: note: site declares {} but covers {}\n", d.path, m.span.line_start,
                               m.declared.to_string(), m.computed.to_string());
    }
    out += fmt::format("{} units, {} in sync, {} drifted, {} unannotated\n", report.units.size(),
                       report.units.size() - report.drifted_count() - report.unannotated_count(),
                       report.drifted_count(), report.unannotated_count());
    return out;
}

std::string drift_json(const CheckReport& report, const FixOutcome* fix) {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["kind"] = "drift";
    doc["units"] = json::array();
    for (const auto& u : report.units) {
        const auto& d = u.drift;
        json sites = json::array();
        for (const auto& m : d.site_mismatches)
            sites.push_back(
                {{"line", m.span.line_start}, {"declared", points(m.declared)}, {"computed", points(m.computed)}});
        doc["units"].push_back({
            {"path", d.path},
            {"type", d.type_name},
            {"declared_total", optional_points(d.declared_total)},
            {"computed_total", points(d.computed_total)},
            {"delta", optional_points(d.delta)},
            {"status", annotations::to_string(d.status)},
            {"site_mismatches", std::move(sites)},
        });
    }
    doc["summary"] = {
        {"units", report.units.size()},
        {"in_sync", report.units.size() - report.drifted_count() - report.unannotated_count()},
        {"drifted", report.drifted_count()},
        {"unannotated", report.unannotated_count()},
        {"parse_failures", report.parse_failures.size()},
    };
    doc["parse_failures"] = problems(report.parse_failures);
    if (fix) {
        doc["fix"] = {{"changed_files", fix->changed_files}, {"conflicts", problems(fix->conflicts)}};
    } else {
        doc["fix"] = nullptr;
    }
    return doc.dump(2) + "\n";
}

std::string drift_csv(const CheckReport& report) {
    std::string out = "path,type,declared_total,computed_total,delta,status\n";
    for (const auto& u : report.units) {
        const auto& d = u.drift;
        out += fmt::format("{},{},{},{},{},{}\n", csv_field(d.path), csv_field(d.type_name),
                           d.declared_total ? d.declared_total->to_string() : "", d.computed_total.to_string(),
                           d.delta ? signed_points(*d.delta) : "", annotations::to_string(d.status));
    }
    return out;
}

} // namespace cdd::cli
