#include "cdd/history/history.hpp"
#include "cdd/history/process.hpp"

#include "helpers.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace cdd;
using namespace cdd::history;

namespace {

std::filesystem::path snapshot_dir() { return testing::fixtures() / "history/snapshots"; }

/// Builds the fixture repository once per test binary run.
const std::filesystem::path& fixture_repo() {
    static testing::TempDir dir("repo");
    static bool built = [] {
        auto r = run_process({"python3", (testing::fixtures() / "history/build_repo.py").string(),
                              snapshot_dir().string(), (dir.path() / "repo").string()});
        REQUIRE_MESSAGE(r.exit_code == 0, r.err);
        return true;
    }();
    (void)built;
    static std::filesystem::path repo = dir.path() / "repo";
    return repo;
}

} // namespace

TEST_CASE("run_process feeds stdin and drains large output") {
    std::string input(1 << 20, 'x');
    auto r = run_process({"cat"}, input);
    CHECK(r.exit_code == 0);
    CHECK(r.out.size() == input.size());
    auto missing = run_process({"definitely-not-a-real-tool-xyz"});
    CHECK(missing.not_found);
    CHECK(run_process({"sh", "-c", "echo oops >&2; exit 3"}).exit_code == 3);
}

TEST_CASE("range parsing") {
    CHECK(RangeSpec::parse("").empty());
    CHECK(*RangeSpec::parse("2").last == 2);
    auto ab = RangeSpec::parse("abc..def");
    CHECK(*ab.from == "abc");
    CHECK(*ab.to == "def");
    CHECK_FALSE(RangeSpec::parse("..def").from);
    CHECK_THROWS(RangeSpec::parse("0"));
    CHECK_THROWS(RangeSpec::parse("x"));
    CHECK_THROWS(RangeSpec::parse(".."));
}

TEST_CASE("detect_cdd_commit") {
    engine::RuleSet r;
    auto c = detect_cdd_commit("cdd(CertificateDetailsController): recompute ICPs", r);
    REQUIRE(c);
    CHECK(c->unit == "CertificateDetailsController");
    CHECK(c->description == "recompute ICPs");
    CHECK_FALSE(detect_cdd_commit("fix: typo", r));
    CHECK_FALSE(detect_cdd_commit("CDD(Foo): x", r));
    CHECK(detect_cdd_commit("cdd(Foo): first line\n\nbody", r)->description == "first line");
    CHECK_FALSE(detect_cdd_commit("intro\ncdd(Foo): second line", r));
}

TEST_CASE("snapshot listing in both modes") {
    auto snaps = open_snapshot_directory(snapshot_dir().string());
    auto all = list_snapshots(*snaps, {});
    REQUIRE(all.size() == 5);
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].ordinal == i);
    CHECK(list_snapshots(*snaps, RangeSpec::parse("2")).size() == 2);
    CHECK(list_snapshots(*snaps, RangeSpec::parse("2")).front().ordinal == 3);
    auto mid = list_snapshots(*snaps, RangeSpec::parse(all[1].id.substr(0, 7) + ".." + all[3].id.substr(0, 7)));
    CHECK(mid.size() == 3);
    CHECK_THROWS_AS(list_snapshots(*snaps, RangeSpec::parse(all[3].id + ".." + all[1].id)), RangeEmpty);
    CHECK_THROWS_AS(list_snapshots(*snaps, RangeSpec::parse("ffffffff..")), RangeEmpty);

    auto repo = open_git_repository(fixture_repo().string());
    auto git_all = list_snapshots(*repo, {});
    REQUIRE(git_all.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(git_all[i].id == all[i].id);
        CHECK(git_all[i].timestamp == all[i].timestamp);
        CHECK(git_all[i].message == all[i].message);
    }
}

TEST_CASE("missing repositories") {
    CHECK_THROWS_AS(open_git_repository("/nonexistent/cdd/repo"), RepoNotFound);
    CHECK_THROWS_AS(open_snapshot_directory("/nonexistent/cdd/snaps"), RepoNotFound);
    testing::TempDir plain("plain");
    CHECK_THROWS_AS(open_git_repository(plain.path().string()), RepoNotFound);
}

TEST_CASE("empty repository has no range") {
    testing::TempDir dir("empty");
    REQUIRE(run_process({"git", "init", "-q", dir.path().string()}).exit_code == 0);
    auto repo = open_git_repository(dir.path().string());
    CHECK_THROWS_AS(list_snapshots(*repo, {}), RangeEmpty);
}

TEST_CASE("read_snapshot_files flags tests and skips binary files") {
    engine::RuleSet rules;
    for (auto* provider : {open_snapshot_directory(snapshot_dir().string()).release(),
                           open_git_repository(fixture_repo().string()).release()}) {
        std::unique_ptr<SnapshotProvider> owner(provider);
        auto commits = list_snapshots(*provider, {});
        auto c1 = read_snapshot_files(*provider, commits[1], rules);
        REQUIRE(c1.files.size() == 2);
        CHECK(c1.files[0].path == "src/main/java/app/Greeter.java");
        CHECK_FALSE(c1.files[0].is_test);
        CHECK(c1.files[1].path == "src/test/java/app/GreeterTest.java");
        CHECK(c1.files[1].is_test);
        CHECK(c1.diagnostics.empty());

        auto c2 = read_snapshot_files(*provider, commits[2], rules);
        CHECK(c2.files.size() == 2);
        REQUIRE(c2.diagnostics.size() == 1);
        CHECK(c2.diagnostics[0].find("Blob.java") != std::string::npos);

        engine::RuleSet none = rules;
        none.include_globs = {"**/*.kt"};
        CHECK(read_snapshot_files(*provider, commits[4], none).files.empty());
    }
}

TEST_CASE("analyze_snapshot examples") {
    engine::RuleSet rules;
    auto empty = analyze_snapshot({}, rules);
    CHECK(empty.class_count == 0);
    CHECK_FALSE(empty.mean_loc);
    CHECK_FALSE(empty.mean_icp);
    CHECK_FALSE(empty.percent_over_limit);

    auto typed = [](int ifs) {
        std::string body;
        for (int i = 0; i < ifs; ++i) body += "    if (x) {}\n";
        return body;
    };
    // 4 and 6 guarded ifs: totals 8 and 12.
    std::vector<SnapshotFile> two{{"A.java", "class A {\n  void m(boolean x) {\n" + typed(4) + "  }\n}\n", false},
                                  {"B.java", "class B {\n  void m(boolean x) {\n" + typed(6) + "  }\n}\n", false}};
    auto s = analyze_snapshot(two, rules);
    CHECK(s.class_count == 2);
    CHECK(*s.mean_icp == 10.0);
    CHECK(*s.percent_over_limit == 50.0);

    engine::RuleSet listing;
    listing.internal_types = {"CertificateRepository", "TrainingCompleted", "Student", "CertificateResponse",
                              "Training"};
    std::string text = testing::read_file(testing::fixtures() / "oracle/CertificateDetailsController.java");
    auto one = analyze_snapshot({{"C.java", text, false}}, listing);
    CHECK(one.class_count == 1);
    CHECK(*one.mean_icp == 8.0);
    CHECK(*one.mean_loc == static_cast<double>(syntax::physical_loc(text)));

    auto broken = analyze_snapshot({{"A.java", "class {", false}, two[0]}, rules);
    CHECK(broken.parse_failures == 1);
    CHECK(broken.class_count == 1);
}

TEST_CASE("multi-class files attribute declaration spans") {
    std::string text = "class A {\n  int x;\n}\n\nclass B {\n}\n";
    auto s = analyze_snapshot({{"AB.java", text, false}}, {});
    CHECK(s.class_count == 2);
    CHECK(*s.mean_loc == 2.5);
}

TEST_CASE("series matches the hand-computed CSV in both modes") {
    engine::RuleSet rules;
    std::string expected = testing::read_file(testing::fixtures() / "history/expected.csv");
    auto snaps = open_snapshot_directory(snapshot_dir().string());
    auto repo = open_git_repository(fixture_repo().string());
    auto from_snaps = series(*snaps, {}, rules);
    auto from_git = series(*repo, {}, rules);
    CHECK(series_csv(from_snaps) == expected);
    CHECK(series_csv(from_git) == expected);

    std::vector<double> over;
    int flagged = 0;
    for (const auto& s : from_git.snapshots) {
        over.push_back(s.analysis.percent_over_limit.value_or(-1));
        flagged += s.cdd_commit.has_value();
    }
    CHECK(over == std::vector<double>{0, 0, 0, 50, 50});
    CHECK(flagged == 1);
    CHECK(from_git.snapshots[4].cdd_commit->unit == "Greeter");
}

TEST_CASE("series is pure and order independent") {
    engine::RuleSet rules;
    auto snaps = open_snapshot_directory(snapshot_dir().string());
    auto a = series(*snaps, {}, rules, 1);
    auto b = series(*snaps, {}, rules, 8);
    CHECK(series_csv(a) == series_csv(b));
    CHECK(series_json(a) == series_json(b));
    auto json = nlohmann::json::parse(series_json(a));
    CHECK(json["schema_version"] == kSeriesSchemaVersion);
    CHECK(json["snapshots"].size() == 5);
    CHECK(json["snapshots"][4]["cdd_commit"]["unit"] == "Greeter");
}

TEST_CASE("single-commit range yields a series of one") {
    auto snaps = open_snapshot_directory(snapshot_dir().string());
    auto s = series(*snaps, RangeSpec::parse("1"), {});
    REQUIRE(s.snapshots.size() == 1);
    CHECK(s.snapshots[0].commit.ordinal == 4);
}

TEST_CASE("exclusion toggles change only class counts of affected snapshots") {
    engine::RuleSet rules;
    engine::RuleSet router_is_test = rules;
    router_is_test.test_globs.push_back("**/Router.java");
    auto snaps = open_snapshot_directory(snapshot_dir().string());
    auto base = series(*snaps, {}, rules);
    auto toggled = series(*snaps, {}, router_is_test);
    for (std::size_t i = 0; i < 5; ++i) {
        std::size_t delta = base.snapshots[i].analysis.class_count - toggled.snapshots[i].analysis.class_count;
        CHECK(delta == (i >= 3 ? 1u : 0u));
        if (i < 3) CHECK(base.snapshots[i].analysis.mean_icp == toggled.snapshots[i].analysis.mean_icp);
    }
}
