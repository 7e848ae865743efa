#include "cdd/cli/app.hpp"

#include "cdd/annotations/annotations.hpp"
#include "cdd/cli/report.hpp"
#include "cdd/engine/analyze.hpp"
#include "cdd/engine/rules.hpp"
#include "cdd/history/history.hpp"
#include "cdd/parallel.hpp"
#include "cdd/syntax/parser.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace cdd::cli {

namespace {

/// Any failure that maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class FailOn { OverLimit, Drift, Never };

struct Options {
    std::string config;
    std::string format = "text";
    std::string fail_on;
    std::vector<std::string> paths;
    std::string init_dir = ".";
    bool force = false;
    bool fix = false;
    std::string range;
    std::string snapshots;
    std::string repo = ".";
    std::string out_dir = ".";
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(fmt::format("cannot read {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
    fs::path tmp = path;
    tmp += ".cdd-tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError(fmt::format("cannot write {}", path.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw UsageError(fmt::format("cannot write {}", path.string()));
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw UsageError(fmt::format("cannot replace {}: {}", path.string(), ec.message()));
}

engine::RuleSet load_config(const Options& o) {
    std::string path = o.config;
    if (path.empty())
        if (const char* env = std::getenv("CDD_CONFIG"); env && *env) path = env;
    if (path.empty()) {
        if (!fs::exists("cdd.json")) return engine::RuleSet{};
        path = "cdd.json";
    }
    if (!fs::exists(path)) throw UsageError(fmt::format("config file {} not found", path));
    try {
        return engine::load_rules(read_file(path));
    } catch (const engine::ConfigError& e) {
        throw UsageError(fmt::format("{}: {}", path, e.what()));
    }
}

FailOn fail_on(const Options& o, FailOn fallback) {
    if (o.fail_on.empty()) return fallback;
    if (o.fail_on == "over-limit") return FailOn::OverLimit;
    if (o.fail_on == "drift") return FailOn::Drift;
    return FailOn::Never;
}

std::string display_path(const fs::path& p) {
    std::string s = p.lexically_normal().generic_string();
    if (s.starts_with("./")) s.erase(0, 2);
    return s;
}

/// Source files under the given roots that match the include globs, minus
/// test files, sorted and deduplicated. Explicitly named files skip the
/// include check.
std::vector<std::string> discover(const std::vector<std::string>& roots, const engine::RuleSet& rules) {
    std::vector<std::string> out;
    for (const auto& root : roots) {
        fs::path r(root);
        if (fs::is_regular_file(r)) {
            out.push_back(display_path(r));
            continue;
        }
        if (!fs::is_directory(r)) throw UsageError(fmt::format("{}: no such file or directory", root));
        for (auto it = fs::recursive_directory_iterator(r); it != fs::recursive_directory_iterator(); ++it) {
            std::string name = it->path().filename().string();
            if (it->is_directory() && name.starts_with('.') && name != "." && name != "..") {
                it.disable_recursion_pending();
                continue;
            }
            if (!it->is_regular_file()) continue;
            std::string p = display_path(it->path());
            if (rules.is_included_path(p) && !rules.is_test_path(p)) out.push_back(std::move(p));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct FileResult {
    std::string text;
    std::vector<UnitReport> units;
    std::optional<std::string> failure;
    std::vector<std::string> warnings;
};

CheckReport build_report(const std::vector<std::string>& files, const engine::RuleSet& rules,
                         std::vector<FileResult>& results) {
    results.assign(files.size(), {});
    std::vector<std::optional<std::string>> io_errors(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        FileResult& r = results[i];
        try {
            r.text = read_file(files[i]);
        } catch (const UsageError& e) {
            io_errors[i] = e.what();
            return;
        }
        syntax::SourceUnit unit;
        try {
            unit = syntax::parse_unit(r.text, files[i]);
        } catch (const syntax::ParseError& e) {
            r.failure = e.what();
            return;
        }
        for (const auto& d : unit.diagnostics) r.warnings.push_back(fmt::format("line {}: {}", d.span.line_start, d.message));
        annotations::DeclaredIcp declared;
        try {
            declared = annotations::extract_declared(unit);
        } catch (const annotations::MalformedIcp& e) {
            r.warnings.push_back(fmt::format("malformed annotation ignored: {}", e.what()));
        }
        for (auto& a : engine::analyze_unit(unit, rules)) {
            UnitReport u;
            u.verdict = engine::verdict(a, rules);
            u.drift = annotations::reconcile(a, declared);
            u.analysis = std::move(a);
            r.units.push_back(std::move(u));
        }
    });
    for (const auto& e : io_errors)
        if (e) throw UsageError(*e);

    CheckReport report;
    report.files = files.size();
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (results[i].failure) report.parse_failures.push_back({files[i], *results[i].failure});
        for (const auto& w : results[i].warnings) report.warnings.push_back({files[i], w});
        for (const auto& u : results[i].units) report.units.push_back(u);
    }
    std::stable_sort(report.units.begin(), report.units.end(), [](const UnitReport& a, const UnitReport& b) {
        if (a.analysis.path != b.analysis.path) return a.analysis.path < b.analysis.path;
        return a.analysis.type_span.byte_start < b.analysis.type_span.byte_start;
    });
    return report;
}

void print_problems(const CheckReport& report, std::ostream& err) {
    for (const auto& p : report.parse_failures) err << fmt::format("{}: parse failure: {}\n", p.path, p.message);
    for (const auto& w : report.warnings) err << fmt::format("{}: warning: {}\n", w.path, w.message);
}

int cmd_init(const Options& o, std::ostream& out) {
    fs::path dir(o.init_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::path target = dir / "cdd.json";
    if (fs::exists(target) && !o.force)
        throw UsageError(fmt::format("{} already exists; pass --force to overwrite", display_path(target)));
    write_file(target, engine::default_config_document());
    out << fmt::format("wrote {}\n", display_path(target));
    return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
    engine::RuleSet rules = load_config(o);
    std::vector<FileResult> results;
    CheckReport report = build_report(discover(o.paths.empty() ? std::vector<std::string>{"."} : o.paths, rules),
                                      rules, results);
    if (o.format == "json") out << check_json(report);
    else if (o.format == "csv") out << check_csv(report);
    else {
        print_problems(report, err);
        out << check_text(report);
    }
    switch (fail_on(o, FailOn::OverLimit)) {
    case FailOn::OverLimit: return report.over_limit_count() ? kExitFailOn : kExitOk;
    case FailOn::Drift: return report.drifted_count() + report.unannotated_count() ? kExitFailOn : kExitOk;
    case FailOn::Never: return kExitOk;
    }
    return kExitOk;
}

int cmd_reconcile(const Options& o, std::ostream& out, std::ostream& err) {
    engine::RuleSet rules = load_config(o);
    std::vector<std::string> files = discover(o.paths.empty() ? std::vector<std::string>{"."} : o.paths, rules);
    std::vector<FileResult> results;
    CheckReport report = build_report(files, rules, results);

    if (!o.fix) {
        if (o.format == "json") out << drift_json(report, nullptr);
        else if (o.format == "csv") out << drift_csv(report);
        else {
            print_problems(report, err);
            out << drift_text(report, nullptr);
        }
        if (fail_on(o, FailOn::Drift) == FailOn::Drift && report.drifted_count() + report.unannotated_count())
            return kExitFailOn;
        if (fail_on(o, FailOn::Drift) == FailOn::OverLimit && report.over_limit_count()) return kExitFailOn;
        return kExitOk;
    }

    FixOutcome fix;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const FileResult& r = results[i];
        bool needs = std::any_of(r.units.begin(), r.units.end(), [](const UnitReport& u) {
            return u.drift.status != annotations::DriftStatus::InSync;
        });
        if (!needs) continue;
        std::vector<engine::UnitAnalysis> analyses;
        for (const auto& u : r.units) analyses.push_back(u.analysis);
        try {
            std::string fixed = annotations::apply_fix(r.text, analyses);
            if (fixed == r.text) continue;
            write_file(files[i], fixed);
            fix.changed_files.push_back(files[i]);
        } catch (const annotations::RewriteConflict& e) {
            fix.conflicts.push_back({files[i], e.what()});
        } catch (const syntax::ParseError& e) {
            fix.conflicts.push_back({files[i], e.what()});
        }
    }
    if (o.format == "json") out << drift_json(report, &fix);
    else {
        print_problems(report, err);
        out << drift_text(report, &fix);
    }
    return fix.conflicts.empty() ? kExitOk : kExitFailOn;
}

int cmd_history(const Options& o, std::ostream& out, std::ostream& err) {
    engine::RuleSet rules = load_config(o);
    history::RangeSpec range;
    try {
        range = history::RangeSpec::parse(o.range);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    history::SeriesReport report;
    try {
        auto provider = o.snapshots.empty() ? history::open_git_repository(o.repo)
                                            : history::open_snapshot_directory(o.snapshots);
        report = history::series(*provider, range, rules);
    } catch (const history::SeriesFailed& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailOn;
    } catch (const history::RepoNotFound& e) {
        throw UsageError(e.what());
    } catch (const history::RangeEmpty& e) {
        throw UsageError(e.what());
    } catch (const history::VcsToolError& e) {
        throw UsageError(e.what());
    }

    std::string csv = history::series_csv(report);
    std::string json = history::series_json(report);
    fs::path dir(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    write_file(dir / "cdd-history.csv", csv);
    write_file(dir / "cdd-history.json", json);

    for (const auto& s : report.snapshots) {
        if (s.error) err << fmt::format("{}: {}\n", s.commit.id, *s.error);
        for (const auto& d : s.analysis.diagnostics) err << fmt::format("{}: {}\n", s.commit.id, d);
    }
    if (o.format == "csv") out << csv;
    else if (o.format == "json") out << json;
    else {
        for (const auto& s : report.snapshots) {
            const auto& a = s.analysis;
            out << fmt::format("{:>4} {:.10} classes {:>4} mean_icp {:>6} over {:>7}{}\n", s.commit.ordinal,
                               s.commit.id, a.class_count, a.mean_icp ? fmt::format("{:.2f}", *a.mean_icp) : "-",
                               a.percent_over_limit ? fmt::format("{:.2f}%", *a.percent_over_limit) : "-",
                               s.cdd_commit ? fmt::format("  cdd({})", s.cdd_commit->unit) : "");
        }
        out << fmt::format("{} snapshots; wrote {} and {}\n", report.snapshots.size(),
                           display_path(dir / "cdd-history.csv"), display_path(dir / "cdd-history.json"));
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Intrinsic complexity point (ICP) checker for Java sources", "cdd"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", o.config, "Config file (default: $CDD_CONFIG, then ./cdd.json)");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--fail-on", o.fail_on, "Condition that yields exit code 1")
        ->check(CLI::IsMember({"over-limit", "drift", "never"}));

    auto* init = app.add_subcommand("init", "Write a commented default cdd.json");
    init->add_option("dir", o.init_dir, "Target directory");
    init->add_flag("--force", o.force, "Overwrite an existing file");

    auto* check = app.add_subcommand("check", "Score units and report those over their limit");
    check->add_option("paths", o.paths, "Files or directories (default: .)");

    auto* reconcile = app.add_subcommand("reconcile", "Compare declared @ICP totals with computed ones");
    reconcile->add_option("paths", o.paths, "Files or directories (default: .)");
    reconcile->add_flag("--fix", o.fix, "Rewrite class-level @ICP annotations to the computed totals");

    auto* hist = app.add_subcommand("history", "Compute per-commit metrics along first-parent history");
    hist->add_option("repo", o.repo, "Repository working directory (default: .)");
    hist->add_option("--range", o.range, "Last N commits, or A..B by commit id prefix");
    hist->add_option("--snapshots", o.snapshots, "Read a snapshot directory instead of a repository");
    hist->add_option("--out-dir", o.out_dir, "Where cdd-history.csv and cdd-history.json are written");

    std::vector<const char*> cargs;
    for (const auto& a : argv) cargs.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*init) return cmd_init(o, out);
        if (*check) return cmd_check(o, out, err);
        if (*reconcile) return cmd_reconcile(o, out, err);
        if (*hist) return cmd_history(o, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

} // namespace cdd::cli
