#pragma once

#include "cdd/engine/analyze.hpp"
#include "cdd/points.hpp"
#include "cdd/syntax/ast.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdd::annotations {

/// A member- or statement-level `@ICP(n)` and the source region it vouches for.
struct SiteDeclaration {
    /// Type (dotted for nested) whose body holds the annotation.
    std::string owner;
    syntax::Span annotation_span;
    syntax::Span covered;
    Points value;
};

struct DeclaredIcp {
    std::map<std::string, Points> class_level;
    std::vector<SiteDeclaration> site_level;
    /// Types carrying more than one class-level `@ICP`.
    std::vector<std::string> duplicate_class_level;

    bool empty() const { return class_level.empty() && site_level.empty(); }
};

class MalformedIcp : public std::runtime_error {
public:
    MalformedIcp(syntax::Span span, const std::string& what) : std::runtime_error(what), span_(span) {}
    const syntax::Span& span() const { return span_; }

private:
    syntax::Span span_;
};

class RewriteConflict : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Collects `@ICP` values from types, fields, methods, parameters, locals and
/// statement markers. Throws MalformedIcp for a missing, non-decimal,
/// negative or non-half argument.
DeclaredIcp extract_declared(const syntax::SourceUnit& unit);

enum class DriftStatus { InSync, Drifted, Unannotated };
std::string_view to_string(DriftStatus status);

struct SiteMismatch {
    syntax::Span span;
    Points declared;
    Points computed;
};

struct DriftReport {
    std::string path;
    std::string type_name;
    std::optional<Points> declared_total;
    Points computed_total;
    /// computed - declared; absent when unannotated.
    std::optional<Points> delta;
    DriftStatus status = DriftStatus::Unannotated;
    /// Informational only; never affects `status`.
    std::vector<SiteMismatch> site_mismatches;
};

DriftReport reconcile(const engine::UnitAnalysis& analysis, const DeclaredIcp& declared);

/// Rewrites (or inserts) the class-level `@ICP` of each analyzed type so it
/// declares the computed total. Every other byte is preserved; in-sync types
/// are left untouched. Throws RewriteConflict when a type has duplicate
/// class-level annotations.
std::string apply_fix(std::string_view text, const std::vector<engine::UnitAnalysis>& analyses);
std::string apply_fix(std::string_view text, const engine::UnitAnalysis& analysis);

} // namespace cdd::annotations
