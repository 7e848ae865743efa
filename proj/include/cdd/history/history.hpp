#pragma once

#include "cdd/engine/method_stats.hpp"
#include "cdd/engine/rules.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdd::history {

class RepoNotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class RangeEmpty : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class VcsToolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
/// Raised by series() when no snapshot in range could be analyzed.
class SeriesFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommitMeta {
    /// Position in the full first-parent history, oldest = 0.
    std::size_t ordinal = 0;
    std::string id;
    std::string timestamp;
    std::string message;
};

/// `N` keeps the last N commits; `A..B` keeps A through B inclusive, where
/// either end is an id prefix and may be omitted.
struct RangeSpec {
    std::optional<std::size_t> last;
    std::optional<std::string> from;
    std::optional<std::string> to;

    static RangeSpec parse(std::string_view text);
    std::string to_string() const;
    bool empty() const { return !last && !from && !to; }
};

struct SnapshotFile {
    std::string path;
    std::string text;
    bool is_test = false;
};

struct SnapshotFiles {
    std::vector<SnapshotFile> files;
    std::vector<std::string> diagnostics;
};

/// Source of commits and their file trees. Implementations are safe to call
/// from several threads.
class SnapshotProvider {
public:
    virtual ~SnapshotProvider() = default;
    /// Full first-parent history, oldest first.
    virtual std::vector<CommitMeta> commits() = 0;
    /// Regular files at `commit` whose path passes `want`, as (path, bytes)
    /// sorted by path.
    virtual std::vector<std::pair<std::string, std::string>> tree(
        const CommitMeta& commit, const std::function<bool(std::string_view)>& want) = 0;
    virtual std::string_view mode() const = 0;
};

/// Reads via the `git` executable. Throws RepoNotFound or VcsToolError.
std::unique_ptr<SnapshotProvider> open_git_repository(const std::string& path);
/// Reads `NNNN_<id>/` directories listed in `commits.jsonl`.
std::unique_ptr<SnapshotProvider> open_snapshot_directory(const std::string& path);

std::vector<CommitMeta> list_snapshots(SnapshotProvider& provider, const RangeSpec& range);

/// Files at `commit` matching the include globs; test files are kept but
/// flagged. Non-UTF-8 files are dropped with a diagnostic.
SnapshotFiles read_snapshot_files(SnapshotProvider& provider, const CommitMeta& commit,
                                  const engine::RuleSet& rules);

struct CddCommit {
    std::string unit;
    std::string description;
    bool operator==(const CddCommit&) const = default;
};

/// Applies the configured commit pattern to the first message line.
std::optional<CddCommit> detect_cdd_commit(std::string_view message, const engine::RuleSet& rules);

struct SnapshotAnalysis {
    std::size_t class_count = 0;
    std::optional<double> mean_loc;
    std::optional<double> mean_icp;
    std::optional<double> percent_over_limit;
    engine::MethodStats method_stats;
    std::size_t files_analyzed = 0;
    std::size_t parse_failures = 0;
    std::vector<std::string> diagnostics;
};

/// Class-level metrics over the non-test files. A file with a single
/// top-level type lends that type its whole physical line count; every other
/// type is measured by its own declaration span.
SnapshotAnalysis analyze_snapshot(const std::vector<SnapshotFile>& files, const engine::RuleSet& rules,
                                  unsigned workers = 0);

struct SnapshotMetrics {
    CommitMeta commit;
    SnapshotAnalysis analysis;
    std::optional<CddCommit> cdd_commit;
    /// Set when the snapshot could not be analyzed at all.
    std::optional<std::string> error;
};

struct SeriesReport {
    std::vector<SnapshotMetrics> snapshots;
    std::string rules_digest;
    std::map<std::string, std::string> parameters;
};

/// Snapshots are analyzed concurrently; `workers` = 1 forces sequential work.
SeriesReport series(SnapshotProvider& provider, const RangeSpec& range, const engine::RuleSet& rules,
                    unsigned workers = 0);

inline constexpr int kSeriesSchemaVersion = 1;

std::string series_csv(const SeriesReport& report);
std::string series_json(const SeriesReport& report);

} // namespace cdd::history
