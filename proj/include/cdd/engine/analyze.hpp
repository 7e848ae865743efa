#pragma once

#include "cdd/engine/rules.hpp"
#include "cdd/points.hpp"
#include "cdd/syntax/ast.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cdd::engine {

/// One counted complexity occurrence.
struct IcpSite {
    Category category;
    Points cost;
    syntax::Span span;
    std::string reason;
};

struct UnitAnalysis {
    std::string path;
    /// Dotted within the file for nested types: `Outer.Inner`.
    std::string type_name;
    std::optional<std::string> package;
    syntax::TypeKind kind = syntax::TypeKind::Class;
    syntax::Span type_span;
    /// Document order.
    std::vector<IcpSite> sites;
    Points total;
    std::array<Points, 5> subtotals{};
    std::optional<Points> declared_total;

    Points subtotal(Category c) const { return subtotals[index_of(c)]; }
    /// Names tried against limit override globs.
    std::vector<std::string> type_names() const;
};

struct Verdict {
    std::string path;
    std::string type_name;
    Points total;
    Points applicable_limit;
    bool over_limit = false;
};

/// One analysis per type declaration, nested types included, in document
/// order. Nested types are scored on their own and not added to the parent.
std::vector<UnitAnalysis> analyze_unit(const syntax::SourceUnit& unit, const RuleSet& rules);

Verdict verdict(const UnitAnalysis& analysis, const RuleSet& rules);

// Per-category building blocks. Each applies the same counting rules as
// analyze_unit restricted to one concern; disabled categories yield nothing.

std::vector<IcpSite> count_branch_sites(const syntax::Stmt& body, const RuleSet& rules);
std::vector<IcpSite> count_condition_sites(const syntax::Expr& guard, const RuleSet& rules);
std::vector<IcpSite> count_exception_sites(const syntax::Try& stmt, const RuleSet& rules);
/// Coupling sites of one type (not its nested types). `unit` provides the
/// package and imports used to resolve simple names.
std::vector<IcpSite> count_coupling_sites(const syntax::TypeDecl& type, const syntax::SourceUnit& unit,
                                          const RuleSet& rules);

/// Whether a written type reference matches any of the patterns, honoring
/// imports and the java.lang/primitive exclusions.
bool type_matches(const syntax::TypeRef& type, const std::vector<std::string>& patterns,
                  const syntax::SourceUnit& unit);

} // namespace cdd::engine
