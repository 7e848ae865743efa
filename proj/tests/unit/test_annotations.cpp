#include "cdd/annotations/annotations.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace cdd;
using namespace cdd::annotations;

namespace {

engine::RuleSet listing_rules() {
    engine::RuleSet r;
    r.internal_types = {"CertificateRepository", "TrainingCompleted", "Student", "CertificateResponse", "Training"};
    return r;
}

std::string listing() { return testing::read_file(testing::fixtures() / "oracle/CertificateDetailsController.java"); }

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
    auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

DriftReport drift_of(const std::string& text, const engine::RuleSet& rules, const std::string& path = "T.java") {
    auto unit = syntax::parse_unit(text, path);
    auto a = engine::analyze_unit(unit, rules).at(0);
    return reconcile(a, extract_declared(unit));
}

} // namespace

TEST_CASE("extract: the listing declares 8 at class level and six sites summing to 8") {
    auto d = extract_declared(syntax::parse_unit(listing(), "C.java"));
    REQUIRE(d.class_level.count("CertificateDetailsController"));
    CHECK(d.class_level["CertificateDetailsController"] == Points::whole(8));
    CHECK(d.site_level.size() == 6);
    Points sum;
    for (const auto& s : d.site_level) sum += s.value;
    CHECK(sum == Points::whole(8));
}

TEST_CASE("extract: no annotations, other annotations, malformed values") {
    CHECK(extract_declared(syntax::parse_unit("class A { int x; }", "A.java")).empty());
    CHECK(extract_declared(syntax::parse_unit("@Deprecated class A { @Override public String toString() { return \"\"; } }",
                                              "A.java"))
              .empty());
    CHECK_THROWS_AS(extract_declared(syntax::parse_unit("@ICP(two) class A {}", "A.java")), MalformedIcp);
    CHECK_THROWS_AS(extract_declared(syntax::parse_unit("@ICP class A {}", "A.java")), MalformedIcp);
    CHECK_THROWS_AS(extract_declared(syntax::parse_unit("@ICP(0.25) class A {}", "A.java")), MalformedIcp);
    auto half = extract_declared(syntax::parse_unit("@ICP(7.5) class A {}", "A.java"));
    CHECK(half.class_level["A"] == Points::from_halves(15));
}

TEST_CASE("reconcile: in sync, drifted, unannotated") {
    auto in_sync = drift_of(listing(), listing_rules());
    CHECK(in_sync.status == DriftStatus::InSync);
    CHECK(*in_sync.delta == Points{});

    auto drifted = drift_of(replace_once(listing(), "@ICP(8)", "@ICP(7)"), listing_rules());
    CHECK(drifted.status == DriftStatus::Drifted);
    CHECK(*drifted.delta == Points::whole(1));
    CHECK(*drifted.declared_total == Points::whole(7));
    CHECK(drifted.computed_total == Points::whole(8));

    auto bare = drift_of("class A { void m(boolean x) { if (x) {} else {} } }", {});
    CHECK(bare.status == DriftStatus::Unannotated);
    CHECK_FALSE(bare.delta);
    CHECK(bare.computed_total == Points::whole(3));
}

TEST_CASE("reconcile: site mismatches are advisory") {
    auto text = "@ICP(2)\nclass A {\n  void m(boolean x) {\n    @ICP(1)\n    if (x) {}\n  }\n}\n";
    auto d = drift_of(text, {});
    CHECK(d.status == DriftStatus::InSync);
    REQUIRE(d.site_mismatches.size() == 1);
    CHECK(d.site_mismatches[0].declared == Points::whole(1));
    CHECK(d.site_mismatches[0].computed == Points::whole(2));
}

TEST_CASE("apply_fix: rewrites a drifted class annotation in place") {
    std::string seven = replace_once(listing(), "@ICP(8)", "@ICP(7)");
    auto unit = syntax::parse_unit(seven, "C.java");
    auto a = engine::analyze_unit(unit, listing_rules()).at(0);
    std::string fixed = apply_fix(seven, a);
    CHECK(fixed == listing());
    CHECK(apply_fix(fixed, a) == fixed);
}

TEST_CASE("apply_fix: in-sync text is untouched, even with a differently written value") {
    CHECK(apply_fix(listing(), engine::analyze_unit(syntax::parse_unit(listing(), "C.java"), listing_rules()).at(0)) ==
          listing());
    std::string spelled = replace_once(listing(), "@ICP(8)", "@ICP(8.0)");
    auto a = engine::analyze_unit(syntax::parse_unit(spelled, "C.java"), listing_rules()).at(0);
    CHECK(apply_fix(spelled, a) == spelled);
}

TEST_CASE("apply_fix: inserts above an unannotated class with its indentation") {
    engine::RuleSet r;
    r.internal_types = {"Course"};
    std::string text = "package p;\n\n/** Doc. */\npublic class A {\n  private Course course;\n}\n";
    auto a = engine::analyze_unit(syntax::parse_unit(text, "A.java"), r).at(0);
    CHECK(a.total == Points::whole(1));
    CHECK(apply_fix(text, a) == "package p;\n\n/** Doc. */\n@ICP(1)\npublic class A {\n  private Course course;\n}\n");

    std::string nested = "class O {\n    static class I {\n        int f(boolean b) { return b ? 1 : 0; }\n    }\n}\n";
    auto units = engine::analyze_unit(syntax::parse_unit(nested, "O.java"), {});
    std::string both = apply_fix(nested, units);
    CHECK(both == "@ICP(0)\nclass O {\n    @ICP(2)\n    static class I {\n        int f(boolean b) { return b ? 1 : 0; }\n    }\n}\n");
    auto again = engine::analyze_unit(syntax::parse_unit(both, "O.java"), {});
    CHECK(apply_fix(both, again) == both);
}

TEST_CASE("apply_fix: keeps other annotations and windows line endings") {
    std::string text = "@Service\r\npublic class B {\r\n  void m(boolean x) { if (x) {} }\r\n}\r\n";
    auto a = engine::analyze_unit(syntax::parse_unit(text, "B.java"), {}).at(0);
    CHECK(apply_fix(text, a) == "@Service\r\n@ICP(2)\r\npublic class B {\r\n  void m(boolean x) { if (x) {} }\r\n}\r\n");
}

TEST_CASE("apply_fix: half totals render with one decimal") {
    engine::RuleSet r;
    r.external_types = {"List"};
    std::string text = "@ICP(3) class A { List<String> xs; }";
    auto a = engine::analyze_unit(syntax::parse_unit(text, "A.java"), r).at(0);
    CHECK(apply_fix(text, a) == "@ICP(0.5) class A { List<String> xs; }");
}

TEST_CASE("apply_fix: duplicate class annotations conflict") {
    std::string text = "@ICP(1)\n@ICP(2)\nclass A {}\n";
    auto unit = syntax::parse_unit(text, "A.java");
    auto d = extract_declared(unit);
    CHECK(d.duplicate_class_level == std::vector<std::string>{"A"});
    auto a = engine::analyze_unit(unit, {}).at(0);
    CHECK_THROWS_AS(apply_fix(text, a), RewriteConflict);
}
