#include "cdd/annotations/annotations.hpp"

#include "cdd/syntax/parser.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace cdd::annotations {

using namespace cdd::syntax;

std::string_view to_string(DriftStatus status) {
    switch (status) {
    case DriftStatus::InSync: return "in_sync";
    case DriftStatus::Drifted: return "drifted";
    case DriftStatus::Unannotated: return "unannotated";
    }
    return "?";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_icp(const AnnotationUse& a) { return a.simple_name() == "ICP"; }

Points icp_value(const AnnotationUse& a) {
    if (!a.raw_args) throw MalformedIcp(a.span, fmt::format("{}: @ICP without a value", a.span.line_start));
    if (!a.numeric_arg)
        throw MalformedIcp(a.span, fmt::format("{}: @ICP({}) is not a decimal", a.span.line_start, *a.raw_args));
    auto halves = a.numeric_arg->to_halves();
    if (!halves || *halves < 0)
        throw MalformedIcp(a.span, fmt::format("{}: @ICP({}) must be a non-negative multiple of 0.5",
                                               a.span.line_start, *a.raw_args));
    return Points::from_halves(*halves);
}

class Extractor {
public:
    DeclaredIcp out;

    void type(const TypeDecl& t, const std::string& prefix) {
        std::string name = prefix.empty() ? t.name : prefix + "." + t.name;
        bool seen = false;
        for (const auto& a : t.annotations) {
            if (!is_icp(a)) continue;
            Points v = icp_value(a);
            if (seen) {
                out.duplicate_class_level.push_back(name);
                continue;
            }
            out.class_level[name] = v;
            seen = true;
        }
        owner_ = name;
        for (const auto& f : t.fields) site(f.annotations, f.span);
        for (const auto& m : t.methods) {
            owner_ = name;
            site(m.annotations, m.signature_span);
            for (const auto& p : m.params) site(p.annotations, p.span);
            if (m.body) stmt(*m.body);
        }
        for (const auto& n : t.nested) type(n, name);
    }

private:
    void site(const std::vector<AnnotationUse>& anns, Span covered) {
        for (const auto& a : anns)
            if (is_icp(a)) out.site_level.push_back({owner_, a.span, covered, icp_value(a)});
    }

    void stmt(const Stmt& s) {
        site(s.markers, s.span);
        std::visit(overloaded{
                       [&](const If& i) {
                           expr(i.condition);
                           stmt(*i.then_branch);
                           if (i.else_branch) stmt(*i.else_branch);
                       },
                       [&](const Loop& l) {
                           for (const auto& i : l.init) stmt(i);
                           if (l.each_var) stmt(*l.each_var);
                           stmt(*l.body);
                       },
                       [&](const Switch& sw) { switch_body(sw.body); },
                       [&](const Try& t) {
                           for (const auto& r : t.resources) stmt(r);
                           stmt(*t.body);
                           for (const auto& c : t.catches) stmt(*c.body);
                           if (t.finally_block) stmt(*t.finally_block);
                       },
                       [&](const LocalDecl& d) {
                           site(d.annotations, s.span);
                           if (d.initializer) expr(*d.initializer);
                       },
                       [&](const ExprStmt& e) { expr(e.expr); },
                       [&](const Return& r) {
                           if (r.value) expr(*r.value);
                       },
                       [&](const Throw& t) { expr(t.value); },
                       [&](const Block& b) {
                           for (const auto& c : b.stmts) stmt(c);
                       },
                       [&](const OtherStmt& o) {
                           for (const auto& c : o.children) stmt(c);
                       },
                   },
                   s.node);
    }

    void switch_body(const SwitchBody& sw) {
        for (const auto& c : sw.cases)
            for (const auto& b : c.body) stmt(b);
    }

    // Statements embedded in expressions: lambda blocks and switch expressions.
    void expr(const Expr& e) {
        std::visit(overloaded{
                       [&](const Lambda& l) {
                           if (l.block_body) stmt(*l.block_body);
                           if (l.expr_body) expr(*l.expr_body);
                       },
                       [&](const SwitchExpr& s) { switch_body(s.body); },
                       [&](const Call& c) {
                           if (c.receiver) expr(*c.receiver);
                           for (const auto& a : c.args) expr(a);
                       },
                       [&](const New& n) {
                           for (const auto& a : n.args) expr(a);
                       },
                       [&](const Compound& c) {
                           for (const auto& o : c.operands) expr(o);
                       },
                       [&](const Ternary& t) {
                           expr(*t.condition);
                           expr(*t.then_expr);
                           expr(*t.else_expr);
                       },
                       [&](const auto&) {},
                   },
                   e.node);
    }

    std::string owner_;
};

const TypeDecl* find_type(const std::vector<TypeDecl>& types, std::string_view dotted) {
    auto dot = dotted.find('.');
    std::string_view head = dotted.substr(0, dot);
    for (const auto& t : types) {
        if (t.name != head) continue;
        if (dot == std::string_view::npos) return &t;
        return find_type(t.nested, dotted.substr(dot + 1));
    }
    return nullptr;
}

struct Edit {
    std::uint32_t start;
    std::uint32_t end;
    std::string replacement;
};

} // namespace

DeclaredIcp extract_declared(const SourceUnit& unit) {
    Extractor ex;
    for (const auto& t : unit.types) ex.type(t, "");
    return std::move(ex.out);
}

DriftReport reconcile(const engine::UnitAnalysis& analysis, const DeclaredIcp& declared) {
    DriftReport r;
    r.path = analysis.path;
    r.type_name = analysis.type_name;
    r.computed_total = analysis.total;
    if (auto it = declared.class_level.find(analysis.type_name); it != declared.class_level.end()) {
        r.declared_total = it->second;
        r.delta = analysis.total - it->second;
        r.status = *r.delta == Points{} ? DriftStatus::InSync : DriftStatus::Drifted;
    }
    for (const auto& s : declared.site_level) {
        if (s.owner != analysis.type_name) continue;
        Points inside;
        for (const auto& site : analysis.sites)
            if (s.covered.contains(site.span)) inside += site.cost;
        if (inside != s.value) r.site_mismatches.push_back({s.annotation_span, s.value, inside});
    }
    return r;
}

std::string apply_fix(std::string_view text, const std::vector<engine::UnitAnalysis>& analyses) {
    if (analyses.empty()) return std::string(text);
    SourceUnit unit = parse_unit(text, analyses.front().path);
    std::string newline = text.find("\r\n") != std::string_view::npos ? "\r\n" : "\n";
    std::vector<Edit> edits;

    for (const auto& a : analyses) {
        const TypeDecl* t = find_type(unit.types, a.type_name);
        if (!t) throw RewriteConflict(fmt::format("type '{}' not found in {}", a.type_name, a.path));
        std::vector<const AnnotationUse*> icps;
        for (const auto& ann : t->annotations)
            if (is_icp(ann)) icps.push_back(&ann);
        if (icps.size() > 1)
            throw RewriteConflict(fmt::format("{}: '{}' has {} class-level @ICP annotations", a.path, a.type_name,
                                              icps.size()));
        std::string rendered = a.total.to_string();
        if (icps.size() == 1) {
            const AnnotationUse& ann = *icps.front();
            if (ann.numeric_arg) {
                auto halves = ann.numeric_arg->to_halves();
                if (halves && Points::from_halves(*halves) == a.total) continue;
            }
            if (ann.args_span) {
                edits.push_back({ann.args_span->byte_start, ann.args_span->byte_end, rendered});
            } else {
                edits.push_back({ann.span.byte_start, ann.span.byte_end, fmt::format("@{}({})", ann.name, rendered)});
            }
            continue;
        }
        std::uint32_t line_start = t->decl_start.byte_start;
        while (line_start > 0 && text[line_start - 1] != '\n') --line_start;
        std::uint32_t indent_end = line_start;
        while (indent_end < text.size() && (text[indent_end] == ' ' || text[indent_end] == '\t')) ++indent_end;
        std::string indent(text.substr(line_start, indent_end - line_start));
        edits.push_back({line_start, line_start, fmt::format("{}@ICP({}){}", indent, rendered, newline)});
    }

    std::sort(edits.begin(), edits.end(), [](const Edit& x, const Edit& y) { return x.start > y.start; });
    std::string out(text);
    for (const auto& e : edits) out.replace(e.start, e.end - e.start, e.replacement);
    return out;
}

std::string apply_fix(std::string_view text, const engine::UnitAnalysis& analysis) {
    return apply_fix(text, std::vector<engine::UnitAnalysis>{analysis});
}

} // namespace cdd::annotations
