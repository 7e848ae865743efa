#include "cdd/history/history.hpp"
#include "cdd/history/process.hpp"
#include "cdd/syntax/lexer.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>

namespace fs = std::filesystem;

namespace cdd::history {

namespace {

std::string trim_trailing(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
}

class GitRepository final : public SnapshotProvider {
public:
    explicit GitRepository(std::string path) : path_(std::move(path)) {
        if (!fs::exists(path_)) throw RepoNotFound(fmt::format("{}: no such directory", path_));
        auto r = git({"rev-parse", "--git-dir"});
        if (r.exit_code != 0) throw RepoNotFound(fmt::format("{}: not a git repository", path_));
    }

    std::string_view mode() const override { return "git"; }

    std::vector<CommitMeta> commits() override {
        auto r = git({"rev-parse", "--verify", "--quiet", "HEAD"});
        if (r.exit_code != 0) return {};
        r = git({"log", "--first-parent", "--reverse", "--format=%H%x1f%cI%x1f%B%x1e", "HEAD"});
        check(r, "git log");
        std::vector<CommitMeta> out;
        std::size_t pos = 0;
        while (pos < r.out.size()) {
            std::size_t end = r.out.find('\x1e', pos);
            if (end == std::string::npos) break;
            std::string record = r.out.substr(pos, end - pos);
            pos = end + 1;
            record.erase(0, record.find_first_not_of('\n'));
            std::size_t a = record.find('\x1f');
            std::size_t b = record.find('\x1f', a + 1);
            if (a == std::string::npos || b == std::string::npos) continue;
            out.push_back({out.size(), record.substr(0, a), record.substr(a + 1, b - a - 1),
                           trim_trailing(record.substr(b + 1))});
        }
        return out;
    }

    std::vector<std::pair<std::string, std::string>> tree(
        const CommitMeta& commit, const std::function<bool(std::string_view)>& want) override {
        auto listing = git({"ls-tree", "-r", "-z", "--full-tree", commit.id});
        check(listing, "git ls-tree");
        std::vector<std::pair<std::string, std::string>> entries; // (path, object id)
        std::size_t pos = 0;
        while (pos < listing.out.size()) {
            std::size_t end = listing.out.find('\0', pos);
            if (end == std::string::npos) end = listing.out.size();
            std::string_view entry(listing.out.data() + pos, end - pos);
            pos = end + 1;
            // "<mode> <type> <object>\t<path>"
            std::size_t tab = entry.find('\t');
            if (tab == std::string_view::npos) continue;
            std::string_view meta = entry.substr(0, tab);
            std::string_view path = entry.substr(tab + 1);
            if (!meta.starts_with("100") || meta.find(" blob ") == std::string_view::npos) continue;
            if (!want(path)) continue;
            entries.emplace_back(std::string(path), std::string(meta.substr(meta.rfind(' ') + 1)));
        }
        std::sort(entries.begin(), entries.end());
        if (entries.empty()) return {};

        std::string request;
        for (const auto& [path, object] : entries) request += object + "\n";
        auto batch = git({"cat-file", "--batch"}, request);
        check(batch, "git cat-file");

        std::vector<std::pair<std::string, std::string>> out;
        out.reserve(entries.size());
        pos = 0;
        for (const auto& [path, object] : entries) {
            std::size_t nl = batch.out.find('\n', pos);
            if (nl == std::string::npos) throw VcsToolError("git cat-file: truncated output");
            std::string_view header(batch.out.data() + pos, nl - pos);
            std::size_t sp = header.rfind(' ');
            std::size_t size = 0;
            auto [ptr, ec] = std::from_chars(header.data() + sp + 1, header.data() + header.size(), size);
            if (sp == std::string_view::npos || ec != std::errc{} || !header.starts_with(object))
                throw VcsToolError(fmt::format("git cat-file: unexpected header '{}'", header));
            (void)ptr;
            out.emplace_back(path, batch.out.substr(nl + 1, size));
            pos = nl + 1 + size + 1;
        }
        return out;
    }

private:
    ProcessResult git(std::vector<std::string> args, const std::string& input = {}) {
        args.insert(args.begin(), {"git", "-C", path_});
        std::lock_guard lock(mutex_);
        auto r = run_process(args, input);
        if (r.not_found)
            throw VcsToolError("git executable not found on PATH; install git or use --snapshots DIR");
        return r;
    }

    static void check(const ProcessResult& r, std::string_view what) {
        if (r.exit_code != 0) throw VcsToolError(fmt::format("{} failed: {}", what, trim_trailing(r.err)));
    }

    std::string path_;
    std::mutex mutex_;
};

class SnapshotDirectory final : public SnapshotProvider {
public:
    explicit SnapshotDirectory(std::string path) : root_(std::move(path)) {
        fs::path index = root_ / "commits.jsonl";
        if (!fs::is_directory(root_) || !fs::exists(index))
            throw RepoNotFound(fmt::format("{}: not a snapshot directory (commits.jsonl missing)", root_.string()));
        std::ifstream in(index, std::ios::binary);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                auto j = nlohmann::json::parse(line);
                commits_.push_back({commits_.size(), j.at("id").get<std::string>(),
                                    j.at("timestamp").get<std::string>(), j.at("message").get<std::string>()});
            } catch (const nlohmann::json::exception& e) {
                throw VcsToolError(fmt::format("{}:{}: {}", index.string(), line_no, e.what()));
            }
        }
    }

    std::string_view mode() const override { return "snapshots"; }

    std::vector<CommitMeta> commits() override { return commits_; }

    std::vector<std::pair<std::string, std::string>> tree(
        const CommitMeta& commit, const std::function<bool(std::string_view)>& want) override {
        fs::path dir = directory_for(commit);
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            std::string rel = fs::relative(entry.path(), dir).generic_string();
            if (!want(rel)) continue;
            std::ifstream in(entry.path(), std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            out.emplace_back(std::move(rel), buf.str());
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    fs::path directory_for(const CommitMeta& commit) const {
        fs::path exact = root_ / fmt::format("{:04}_{}", commit.ordinal, commit.id);
        if (fs::is_directory(exact)) return exact;
        std::string suffix = "_" + commit.id;
        for (const auto& entry : fs::directory_iterator(root_))
            if (entry.is_directory() && entry.path().filename().string().ends_with(suffix)) return entry.path();
        throw VcsToolError(fmt::format("{}: no snapshot directory for commit {}", root_.string(), commit.id));
    }

    fs::path root_;
    std::vector<CommitMeta> commits_;
};

std::size_t find_prefix(const std::vector<CommitMeta>& all, const std::string& prefix) {
    std::size_t found = all.size();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!all[i].id.starts_with(prefix)) continue;
        if (found != all.size()) throw RangeEmpty(fmt::format("commit prefix '{}' is ambiguous", prefix));
        found = i;
    }
    if (found == all.size()) throw RangeEmpty(fmt::format("no commit matches '{}'", prefix));
    return found;
}

} // namespace

std::unique_ptr<SnapshotProvider> open_git_repository(const std::string& path) {
    return std::make_unique<GitRepository>(path);
}

std::unique_ptr<SnapshotProvider> open_snapshot_directory(const std::string& path) {
    return std::make_unique<SnapshotDirectory>(path);
}

RangeSpec RangeSpec::parse(std::string_view text) {
    RangeSpec r;
    if (text.empty()) return r;
    if (auto dots = text.find(".."); dots != std::string_view::npos) {
        std::string_view a = text.substr(0, dots), b = text.substr(dots + 2);
        if (!a.empty()) r.from = std::string(a);
        if (!b.empty()) r.to = std::string(b);
        if (!r.from && !r.to) throw std::invalid_argument("range '..' names no commit");
        return r;
    }
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || ptr != text.data() + text.size() || n == 0)
        throw std::invalid_argument(fmt::format("range '{}' must be a positive count or A..B", text));
    r.last = n;
    return r;
}

std::string RangeSpec::to_string() const {
    if (last) return std::to_string(*last);
    if (from || to) return from.value_or("") + ".." + to.value_or("");
    return "";
}

std::vector<CommitMeta> list_snapshots(SnapshotProvider& provider, const RangeSpec& range) {
    std::vector<CommitMeta> all = provider.commits();
    if (all.empty()) throw RangeEmpty("history has no commits");
    std::size_t begin = range.from ? find_prefix(all, *range.from) : 0;
    std::size_t end = range.to ? find_prefix(all, *range.to) + 1 : all.size();
    if (begin >= end) throw RangeEmpty(fmt::format("range '{}' selects no commits", range.to_string()));
    if (range.last && end - begin > *range.last) begin = end - *range.last;
    return {all.begin() + static_cast<std::ptrdiff_t>(begin), all.begin() + static_cast<std::ptrdiff_t>(end)};
}

SnapshotFiles read_snapshot_files(SnapshotProvider& provider, const CommitMeta& commit,
                                  const engine::RuleSet& rules) {
    SnapshotFiles out;
    auto want = [&](std::string_view path) { return rules.is_included_path(path); };
    for (auto& [path, bytes] : provider.tree(commit, want)) {
        if (!syntax::is_valid_utf8(bytes)) {
            out.diagnostics.push_back(fmt::format("{}: not valid UTF-8, skipped", path));
            continue;
        }
        bool test = rules.is_test_path(path);
        out.files.push_back({std::move(path), std::move(bytes), test});
    }
    return out;
}

} // namespace cdd::history
