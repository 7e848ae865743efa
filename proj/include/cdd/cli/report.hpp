#pragma once

#include "cdd/annotations/annotations.hpp"
#include "cdd/engine/analyze.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace cdd::cli {

inline constexpr int kReportSchemaVersion = 1;

struct UnitReport {
    engine::UnitAnalysis analysis;
    engine::Verdict verdict;
    annotations::DriftReport drift;
};

struct FileProblem {
    std::string path;
    std::string message;
};

struct CheckReport {
    /// Sorted by path, then by declaration position.
    std::vector<UnitReport> units;
    std::size_t files = 0;
    std::vector<FileProblem> parse_failures;
    /// Non-fatal notes from files that did parse, such as skipped members.
    std::vector<FileProblem> warnings;

    std::size_t over_limit_count() const;
    std::size_t drifted_count() const;
    std::size_t unannotated_count() const;
};

/// Up to three non-zero categories, largest first (ties in category order).
std::vector<engine::Category> top_categories(const engine::UnitAnalysis& analysis, std::size_t n = 3);

std::string check_text(const CheckReport& report);
std::string check_json(const CheckReport& report);
std::string check_csv(const CheckReport& report);

struct FixOutcome {
    std::vector<std::string> changed_files;
    std::vector<FileProblem> conflicts;
};

std::string drift_text(const CheckReport& report, const FixOutcome* fix);
std::string drift_json(const CheckReport& report, const FixOutcome* fix);
std::string drift_csv(const CheckReport& report);

} // namespace cdd::cli
