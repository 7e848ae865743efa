#include "cdd/annotations/annotations.hpp"
#include "cdd/engine/analyze.hpp"
#include "cdd/parallel.hpp"

#include "generator.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace cdd;
using namespace cdd::engine;
using namespace cdd::syntax;

namespace {

constexpr int kCases = 250;
constexpr std::uint64_t kSeed = 0x5eed'cdd0'2024ULL;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Counts constructs and checks span containment over a whole tree.
struct TreeWalker {
    testing::ConstructCounts counts;
    int nesting_violations = 0;

    void inside(const Span& parent, const Span& child) {
        if (!parent.contains(child)) ++nesting_violations;
    }

    void expr(const Expr& e) {
        auto sub = [&](const Expr& c) {
            inside(e.span, c.span);
            expr(c);
        };
        std::visit(overloaded{
                       [&](const BoolBinary& b) { sub(*b.lhs), sub(*b.rhs); },
                       [&](const Not& n) { sub(*n.inner); },
                       [&](const Comparison& c) { sub(*c.lhs), sub(*c.rhs); },
                       [&](const Ternary& t) {
                           ++counts.ternaries;
                           sub(*t.condition), sub(*t.then_expr), sub(*t.else_expr);
                       },
                       [&](const Call& c) {
                           if (c.receiver) sub(*c.receiver);
                           for (const auto& a : c.args) sub(a);
                       },
                       [&](const FieldAccess& f) { sub(*f.receiver); },
                       [&](const Lambda& l) {
                           if (l.expr_body) sub(*l.expr_body);
                           if (l.block_body) {
                               inside(e.span, l.block_body->span);
                               stmt(*l.block_body);
                           }
                       },
                       [&](const New& n) {
                           for (const auto& a : n.args) sub(a);
                       },
                       [&](const SwitchExpr& s) { switch_body(e.span, s.body); },
                       [&](const Compound& c) {
                           for (const auto& o : c.operands) sub(o);
                       },
                       [&](const auto&) {},
                   },
                   e.node);
    }

    void switch_body(const Span& parent, const SwitchBody& s) {
        inside(parent, s.scrutinee->span);
        expr(*s.scrutinee);
        for (const auto& c : s.cases)
            for (const auto& b : c.body) {
                inside(parent, b.span);
                stmt(b);
            }
    }

    void stmt(const Stmt& s) {
        auto sub = [&](const Stmt& c) {
            inside(s.span, c.span);
            stmt(c);
        };
        auto sube = [&](const Expr& c) {
            inside(s.span, c.span);
            expr(c);
        };
        std::visit(overloaded{
                       [&](const If& i) {
                           ++counts.ifs;
                           sube(i.condition);
                           sub(*i.then_branch);
                           if (i.else_branch) sub(*i.else_branch);
                       },
                       [&](const Loop& l) {
                           ++counts.loops;
                           for (const auto& x : l.init) sub(x);
                           if (l.condition) sube(*l.condition);
                           for (const auto& u : l.update) sube(u);
                           if (l.each_var) sub(*l.each_var);
                           if (l.iterable) sube(*l.iterable);
                           sub(*l.body);
                       },
                       [&](const Switch& sw) { switch_body(s.span, sw.body); },
                       [&](const Try& t) {
                           ++counts.tries;
                           for (const auto& r : t.resources) sub(r);
                           sub(*t.body);
                           for (const auto& c : t.catches) {
                               ++counts.catches;
                               sub(*c.body);
                           }
                           if (t.finally_block) {
                               ++counts.finallys;
                               sub(*t.finally_block);
                           }
                       },
                       [&](const LocalDecl& d) {
                           if (d.initializer) sube(*d.initializer);
                       },
                       [&](const ExprStmt& e) { sube(e.expr); },
                       [&](const Return& r) {
                           if (r.value) sube(*r.value);
                       },
                       [&](const Throw& t) { sube(t.value); },
                       [&](const Block& b) {
                           for (const auto& c : b.stmts) sub(c);
                       },
                       [&](const OtherStmt& o) {
                           for (const auto& e : o.exprs) sube(e);
                           for (const auto& c : o.children) sub(c);
                       },
                   },
                   s.node);
    }

    void type(const TypeDecl& t) {
        for (const auto& f : t.fields) inside(t.span, f.span);
        for (const auto& m : t.methods) {
            inside(t.span, m.span);
            if (m.body) {
                inside(m.span, m.body->span);
                stmt(*m.body);
            }
        }
        for (const auto& n : t.nested) {
            inside(t.span, n.span);
            type(n);
        }
    }
};

struct Sample {
    testing::ClassModel model;
    testing::ConstructCounts counts;
    std::string text;
};

std::vector<Sample> samples(std::uint64_t seed, int n) {
    testing::JavaGenerator gen(seed);
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
        gen.counts = {};
        Sample s;
        s.model = gen.make_class("Gen" + std::to_string(i));
        s.counts = gen.counts;
        s.text = s.model.render();
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<UnitAnalysis> score(const std::string& text, const RuleSet& rules) {
    return analyze_unit(parse_unit(text, "src/main/java/Gen.java"), rules);
}

bool same_sites(const std::vector<IcpSite>& a, const std::vector<IcpSite>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].category != b[i].category || a[i].cost != b[i].cost || a[i].reason != b[i].reason ||
            a[i].span.byte_start != b[i].span.byte_start || a[i].span.byte_end != b[i].span.byte_end)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("property: generated sources parse cleanly, completely and with nested spans") {
    for (const auto& s : samples(kSeed, kCases)) {
        auto unit = parse_unit(s.text, "Gen.java");
        CAPTURE(s.text);
        REQUIRE(unit.diagnostics.empty());
        TreeWalker w;
        for (const auto& t : unit.types) w.type(t);
        CHECK(w.counts == s.counts);
        CHECK(w.nesting_violations == 0);
        CHECK(dump(unit) == dump(parse_unit(s.text, "Gen.java")));
    }
}

TEST_CASE("property: additivity") {
    RuleSet rules = testing::generator_rules();
    for (const auto& s : samples(kSeed + 1, kCases)) {
        auto base = score(s.text, rules);
        for (Category removed : kAllCategories) {
            RuleSet without = rules;
            without.rule(removed).enabled = false;
            auto reduced = score(s.text, without);
            REQUIRE(reduced.size() == base.size());
            for (std::size_t u = 0; u < base.size(); ++u) {
                Points sum, site_sum;
                for (Category c : kAllCategories) sum += base[u].subtotal(c);
                for (const auto& site : base[u].sites) site_sum += site.cost;
                CHECK(sum == base[u].total);
                CHECK(site_sum == base[u].total);
                CHECK(reduced[u].total == base[u].total - base[u].subtotal(removed));
                std::vector<IcpSite> kept;
                for (const auto& site : base[u].sites)
                    if (site.category != removed) kept.push_back(site);
                CHECK(same_sites(kept, reduced[u].sites));
            }
        }
    }
}

TEST_CASE("property: cost linearity with co-scaled limits") {
    RuleSet rules = testing::generator_rules();
    rules.default_limit = Points::whole(6);
    testing::JavaGenerator pick(kSeed + 2);
    for (const auto& s : samples(kSeed + 2, kCases)) {
        int k = pick.pick(2, 5);
        RuleSet scaled = rules;
        for (auto& c : scaled.categories) c.cost = c.cost * k;
        scaled.default_limit = rules.default_limit * k;
        auto base = score(s.text, rules);
        auto big = score(s.text, scaled);
        REQUIRE(base.size() == big.size());
        for (std::size_t u = 0; u < base.size(); ++u) {
            CHECK(big[u].total == base[u].total * k);
            CHECK(verdict(big[u], scaled).over_limit == verdict(base[u], rules).over_limit);
        }
    }
}

TEST_CASE("property: appending if (true) {} adds at least 2 and never lowers a category") {
    RuleSet rules = testing::generator_rules();
    testing::JavaGenerator pick(kSeed + 3);
    for (auto s : samples(kSeed + 3, kCases)) {
        auto before = score(s.text, rules);
        auto& methods = s.model.methods;
        methods[static_cast<std::size_t>(pick.pick(0, static_cast<int>(methods.size()) - 1))].statements.push_back(
            "if (true) {}");
        auto after = score(s.model.render(), rules);
        REQUIRE(after.size() == before.size());
        CHECK(after[0].total >= before[0].total + Points::whole(2));
        for (Category c : kAllCategories) CHECK(after[0].subtotal(c) >= before[0].subtotal(c));
        for (std::size_t u = 1; u < before.size(); ++u) CHECK(after[u].total == before[u].total);
    }
}

TEST_CASE("property: wrapping a counted-free expression in a lambda changes nothing") {
    RuleSet rules = testing::generator_rules();
    testing::JavaGenerator pick(kSeed + 4);
    for (auto s : samples(kSeed + 4, kCases)) {
        auto& stmts = s.model.methods[0].statements;
        auto pos = static_cast<std::size_t>(pick.pick(0, static_cast<int>(stmts.size())));
        auto plain = s.model;
        plain.methods[0].statements.insert(plain.methods[0].statements.begin() + static_cast<std::ptrdiff_t>(pos),
                                           "helper(a, b);");
        auto wrapped = s.model;
        wrapped.methods[0].statements.insert(wrapped.methods[0].statements.begin() + static_cast<std::ptrdiff_t>(pos),
                                             pick.chance(50) ? "run(() -> helper(a, b));" : "run(() -> { helper(a, b); });");
        auto x = score(plain.render(), rules);
        auto y = score(wrapped.render(), rules);
        REQUIRE(x.size() == y.size());
        for (std::size_t u = 0; u < x.size(); ++u) {
            CHECK(x[u].total == y[u].total);
            for (Category c : kAllCategories) CHECK(x[u].subtotal(c) == y[u].subtotal(c));
        }
    }
}

TEST_CASE("property: parallel analysis matches sequential analysis") {
    RuleSet rules = testing::generator_rules();
    auto corpus = samples(kSeed + 5, kCases);
    std::vector<std::vector<UnitAnalysis>> seq(corpus.size()), par(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) seq[i] = score(corpus[i].text, rules);
    for (int round = 0; round < 3; ++round) {
        parallel_for(corpus.size(), [&](std::size_t i) { par[i] = score(corpus[i].text, rules); }, 8);
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            REQUIRE(par[i].size() == seq[i].size());
            for (std::size_t u = 0; u < seq[i].size(); ++u) {
                CHECK(par[i][u].total == seq[i][u].total);
                CHECK(same_sites(par[i][u].sites, seq[i][u].sites));
            }
        }
    }
}

TEST_CASE("property: fix is idempotent, sound and local") {
    RuleSet rules = testing::generator_rules();
    testing::JavaGenerator pick(kSeed + 6);
    auto strip_icp_lines = [](const std::string& text) {
        std::string out;
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);)
            if (line.find("@ICP(") == std::string::npos) out += line + "\n";
        return out;
    };
    for (auto s : samples(kSeed + 6, kCases)) {
        auto annotate = [&](testing::ClassModel& c) {
            int k = pick.pick(0, 2);
            if (k == 1) c.annotation = "@ICP(" + std::to_string(pick.pick(0, 20)) + ")";
            if (k == 2) c.annotation = "@ICP(" + std::to_string(pick.pick(0, 9)) + ".5)";
        };
        annotate(s.model);
        for (auto& n : s.model.nested) annotate(n);
        std::string text = s.model.render();

        auto analyses = score(text, rules);
        std::string once = annotations::apply_fix(text, analyses);
        auto unit = parse_unit(once, "src/main/java/Gen.java");
        auto declared = annotations::extract_declared(unit);
        auto after = analyze_unit(unit, rules);
        REQUIRE(after.size() == analyses.size());
        for (const auto& a : after) CHECK(annotations::reconcile(a, declared).status == annotations::DriftStatus::InSync);
        CHECK(annotations::apply_fix(once, after) == once);
        CHECK(strip_icp_lines(once) == strip_icp_lines(text));
    }
}
