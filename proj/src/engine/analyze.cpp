#include "cdd/engine/analyze.hpp"

#include "cdd/glob.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <set>
#include <unordered_map>

namespace cdd::engine {

using namespace cdd::syntax;

std::vector<std::string> UnitAnalysis::type_names() const {
    std::vector<std::string> names{type_name};
    if (package) names.push_back(*package + "." + type_name);
    return names;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Simple names from java.lang that never count as coupling.
const std::set<std::string_view>& java_lang_names() {
    static const std::set<std::string_view> names{
        "Object", "String", "Integer", "Long", "Short", "Byte", "Character", "Boolean", "Double", "Float",
        "Number", "Math", "StrictMath", "System", "Thread", "Runnable", "Iterable", "Comparable",
        "CharSequence", "StringBuilder", "StringBuffer", "Exception", "RuntimeException", "Error", "Throwable",
        "Class", "Void", "Enum", "Record", "Override", "Deprecated", "FunctionalInterface", "SuppressWarnings",
        "SafeVarargs", "AutoCloseable", "Cloneable", "Process", "ProcessBuilder", "Runtime", "ThreadLocal",
        "IllegalArgumentException", "IllegalStateException", "NullPointerException",
        "UnsupportedOperationException", "IndexOutOfBoundsException", "ArrayIndexOutOfBoundsException",
        "ArithmeticException", "ClassCastException", "InterruptedException", "NumberFormatException",
        "CloneNotSupportedException", "ReflectiveOperationException", "ClassNotFoundException",
        "SecurityException", "StackOverflowError", "OutOfMemoryError", "AssertionError"};
    return names;
}

bool never_matches(const TypeRef& t) {
    if (t.is_primitive() || t.qualified_name == "var") return true;
    std::string_view q = t.qualified_name;
    if (q.starts_with("java.lang.")) {
        q.remove_prefix(10);
        return q.find('.') == std::string_view::npos;
    }
    return q.find('.') == std::string_view::npos && java_lang_names().count(q) > 0;
}

// Every spelling a written type name may be matched under.
std::vector<std::string> type_candidates(const TypeRef& t, const SourceUnit* unit) {
    std::vector<std::string> out{t.qualified_name};
    std::string_view simple = t.simple_name();
    if (simple != t.qualified_name) out.emplace_back(simple);
    if (!unit) return out;
    std::string_view first = t.qualified_name;
    first = first.substr(0, first.find('.'));
    for (const auto& imp : unit->imports) {
        if (imp.wildcard || imp.is_static) continue;
        std::string_view last = imp.name;
        last = last.substr(last.rfind('.') + 1);
        if (last == first) out.push_back(imp.name + t.qualified_name.substr(first.size()));
    }
    if (unit->package && t.qualified_name.find('.') == std::string::npos)
        out.push_back(*unit->package + "." + t.qualified_name);
    return out;
}

bool matches_any(const TypeRef& t, const std::vector<std::string>& patterns, const SourceUnit* unit) {
    if (patterns.empty() || never_matches(t)) return false;
    for (const auto& cand : type_candidates(t, unit))
        for (const auto& p : patterns)
            if (glob_match(p, cand, '.')) return true;
    return false;
}

std::string describe(const TypeRef& t) { return t.qualified_name; }

enum Mask : unsigned {
    kBranch = 1u << 0,
    kCondition = 1u << 1,
    kException = 1u << 2,
    kInternal = 1u << 3,
    kExternal = 1u << 4,
    kAll = 0x1F,
};

// Names already counted for statement-level internal coupling in the
// statement being walked.
using UseSet = std::set<std::string>;

class Collector {
public:
    Collector(const RuleSet& rules, const SourceUnit* unit, unsigned mask) : rules_(rules), unit_(unit), mask_(mask) {}

    std::vector<IcpSite> take() {
        std::stable_sort(sites_.begin(), sites_.end(),
                         [](const IcpSite& a, const IcpSite& b) { return a.span.byte_start < b.span.byte_start; });
        return std::move(sites_);
    }

    // Fields of enclosing types stay visible inside nested types.
    void enter_outer(const TypeDecl* outer) { type_chain_.push_back(outer); }

    void type(const TypeDecl& t) {
        type_chain_.push_back(&t);
        for (const auto& f : t.fields) {
            UseSet uses;
            declaration(f.declared_type, f.name, "field", uses, f.span);
            if (f.initializer) {
                initializer_use(*f.initializer, uses);
                expr(*f.initializer, uses);
            }
        }
        for (const auto& c : t.enum_constants) {
            UseSet uses;
            for (const auto& a : c.args) expr(a, uses);
        }
        for (const auto& m : t.methods) method(m);
        type_chain_.pop_back();
    }

    void stmt(const Stmt& s) {
        std::visit(overloaded{
                       [&](const If& i) {
                           add(Category::Branch, i.if_keyword, "if");
                           if (i.else_keyword) add(Category::Branch, *i.else_keyword, "else branch");
                           UseSet uses;
                           guard(i.condition, "if");
                           expr(i.condition, uses);
                           stmt(*i.then_branch);
                           if (i.else_branch) stmt(*i.else_branch);
                       },
                       [&](const Loop& l) { loop(l); },
                       [&](const Switch& sw) {
                           UseSet uses;
                           switch_body(sw.body, uses);
                       },
                       [&](const Try& t) { try_stmt(t); },
                       [&](const LocalDecl& d) {
                           UseSet uses;
                           local(d, uses);
                       },
                       [&](const ExprStmt& e) {
                           UseSet uses;
                           expr(e.expr, uses);
                       },
                       [&](const Return& r) {
                           UseSet uses;
                           if (r.value) expr(*r.value, uses);
                       },
                       [&](const Throw& t) {
                           UseSet uses;
                           expr(t.value, uses);
                       },
                       [&](const Block& b) {
                           push_scope();
                           for (const auto& c : b.stmts) stmt(c);
                           pop_scope();
                       },
                       [&](const OtherStmt& o) {
                           UseSet uses;
                           for (const auto& e : o.exprs) expr(e, uses);
                           for (const auto& c : o.children) stmt(c);
                       },
                   },
                   s.node);
    }

    void guard(const Expr& cond, std::string_view owner) {
        if (!(mask_ & kCondition)) return;
        std::vector<const Expr*> starts;
        const Expr* leftmost = &cond;
        while (auto* b = std::get_if<BoolBinary>(&leftmost->node)) leftmost = b->lhs.get();
        starts.push_back(leftmost);
        collect_bool_rhs(cond, starts);
        std::size_t n = starts.size();
        for (std::size_t i = 0; i < n; ++i)
            add(Category::Condition, starts[i]->span,
                fmt::format("boolean condition {} of {} ({})", i + 1, n, owner));
    }

    void expr(const Expr& e, UseSet& uses) {
        std::visit(overloaded{
                       [&](const BoolBinary& b) {
                           expr(*b.lhs, uses);
                           expr(*b.rhs, uses);
                       },
                       [&](const Not& n) { expr(*n.inner, uses); },
                       [&](const Comparison& c) {
                           expr(*c.lhs, uses);
                           expr(*c.rhs, uses);
                       },
                       [&](const Ternary& t) {
                           add(Category::Branch, e.span, "ternary operator");
                           guard(*t.condition, "ternary");
                           expr(*t.condition, uses);
                           expr(*t.then_expr, uses);
                           expr(*t.else_expr, uses);
                       },
                       [&](const Call& c) {
                           if (c.receiver) {
                               receiver_use(*c.receiver, uses);
                               expr(*c.receiver, uses);
                           }
                           for (const auto& a : c.args) expr(a, uses);
                       },
                       [&](const NameRef&) {},
                       [&](const This&) {},
                       [&](const FieldAccess& f) { expr(*f.receiver, uses); },
                       [&](const Lambda& l) { lambda(e, l, uses); },
                       [&](const New& n) {
                           if ((mask_ & kInternal) && matches_any(n.type, rules_.internal_types, unit_) &&
                               uses.insert("new " + n.type.qualified_name).second)
                               add(Category::InternalCoupling, n.type.span,
                                   fmt::format("internal coupling: new {}", describe(n.type)));
                           for (const auto& a : n.args) expr(a, uses);
                       },
                       [&](const Literal&) {},
                       [&](const SwitchExpr& s) { switch_body(s.body, uses); },
                       [&](const Compound& c) {
                           for (const auto& o : c.operands) expr(o, uses);
                       },
                       [&](const Opaque&) {},
                   },
                   e.node);
    }

private:
    void add(Category c, Span span, std::string reason) {
        unsigned bit = 1u << index_of(c);
        if (!(mask_ & bit)) return;
        const auto& rule = rules_.rule(c);
        if (!rule.enabled) return;
        sites_.push_back(IcpSite{c, rule.cost, span, std::move(reason)});
    }

    // ---- scopes -------------------------------------------------------

    // nullptr marks a name declared without an explicit type (`var`).
    using Scope = std::unordered_map<std::string, const TypeRef*>;

    void push_scope() { scopes_.emplace_back(); }
    void pop_scope() { scopes_.pop_back(); }
    void declare(const std::string& name, const TypeRef* type) {
        if (scopes_.empty()) push_scope();
        scopes_.back()[name] = type;
    }

    // Returns the declared type of a visible name, or nullopt when undeclared.
    std::optional<const TypeRef*> resolve(const std::string& name, bool fields_only) const {
        if (!fields_only) {
            for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
                auto found = it->find(name);
                if (found != it->end()) return found->second;
            }
        }
        for (auto it = type_chain_.rbegin(); it != type_chain_.rend(); ++it)
            for (const auto& f : (*it)->fields)
                if (f.name == name) return &f.declared_type;
        return std::nullopt;
    }

    // ---- declarations -------------------------------------------------

    void declaration(const TypeRef& type, const std::string& name, std::string_view what, UseSet& uses, Span span) {
        (void)span;
        if ((mask_ & kInternal) && matches_any(type, rules_.internal_types, unit_) && uses.insert(name).second)
            add(Category::InternalCoupling, type.span,
                fmt::format("internal coupling: {} {} {}", describe(type), what, name));
        if ((mask_ & kExternal) && matches_any(type, rules_.external_types, unit_))
            add(Category::ExternalCoupling, type.span,
                fmt::format("external coupling: {} {} {}", describe(type), what, name));
    }

    void local(const LocalDecl& d, UseSet& uses) {
        if (d.declared_type) declaration(*d.declared_type, d.name, "local", uses, d.name_span);
        if (d.initializer) {
            initializer_use(*d.initializer, uses);
            expr(*d.initializer, uses);
        }
        declare(d.name, d.declared_type ? &*d.declared_type : nullptr);
    }

    void method(const MethodDecl& m) {
        push_scope();
        UseSet signature;
        for (const auto& p : m.params) {
            if (p.type) {
                UseSet per_param;
                declaration(*p.type, p.name, "parameter", per_param, p.span);
            }
            declare(p.name, p.type ? &*p.type : nullptr);
        }
        if (m.return_type && (mask_ & kInternal) && matches_any(*m.return_type, rules_.internal_types, unit_))
            add(Category::InternalCoupling, m.return_type->span,
                fmt::format("internal coupling: {} return type of {}", describe(*m.return_type), m.name));
        if (m.body) stmt(*m.body);
        pop_scope();
    }

    // ---- statement-level internal uses ---------------------------------

    struct NameUse {
        std::string name;
        bool via_this;
    };

    static std::optional<NameUse> root_name(const Expr& e) {
        if (auto* n = std::get_if<NameRef>(&e.node)) return NameUse{n->name, false};
        if (auto* f = std::get_if<FieldAccess>(&e.node)) {
            if (std::holds_alternative<This>(f->receiver->node)) return NameUse{f->name, true};
            return root_name(*f->receiver);
        }
        return std::nullopt;
    }

    void name_use(const NameUse& use, Span span, UseSet& uses, std::string_view how) {
        if (!(mask_ & kInternal) || use.name == "super") return;
        auto declared = resolve(use.name, use.via_this);
        if (declared) {
            if (*declared && matches_any(**declared, rules_.internal_types, unit_) && uses.insert(use.name).second)
                add(Category::InternalCoupling, span,
                    fmt::format("internal coupling: {} ({}) {}", use.name, describe(**declared), how));
            return;
        }
        // An undeclared capitalized receiver is read as a static type use.
        if (!use.via_this && !use.name.empty() && use.name[0] >= 'A' && use.name[0] <= 'Z') {
            TypeRef t;
            t.qualified_name = use.name;
            if (matches_any(t, rules_.internal_types, unit_) && uses.insert(use.name).second)
                add(Category::InternalCoupling, span, fmt::format("internal coupling: {} static {}", use.name, how));
        }
    }

    void receiver_use(const Expr& receiver, UseSet& uses) {
        if (auto use = root_name(receiver)) name_use(*use, receiver.span, uses, "receiver");
    }

    void initializer_use(const Expr& init, UseSet& uses) {
        bool bare = std::holds_alternative<NameRef>(init.node);
        if (auto* f = std::get_if<FieldAccess>(&init.node)) bare = std::holds_alternative<This>(f->receiver->node);
        if (!bare) return;
        if (auto use = root_name(init)) name_use(*use, init.span, uses, "initializer");
    }

    // ---- compound statements -----------------------------------------

    void loop(const Loop& l) {
        static constexpr std::string_view names[] = {"for loop", "while loop", "do-while loop", "enhanced for loop"};
        add(Category::Branch, l.keyword, std::string(names[static_cast<int>(l.kind)]));
        push_scope();
        UseSet uses;
        for (const auto& i : l.init) {
            if (auto* d = std::get_if<LocalDecl>(&i.node)) local(*d, uses);
            else if (auto* e = std::get_if<ExprStmt>(&i.node)) expr(e->expr, uses);
        }
        if (l.iterable) expr(*l.iterable, uses);
        if (l.each_var)
            if (auto* d = std::get_if<LocalDecl>(&l.each_var->node)) local(*d, uses);
        if (l.condition) {
            guard(*l.condition, names[static_cast<int>(l.kind)]);
            expr(*l.condition, uses);
        }
        for (const auto& u : l.update) expr(u, uses);
        stmt(*l.body);
        pop_scope();
    }

    void switch_body(const SwitchBody& sw, UseSet& uses) {
        add(Category::Branch, sw.keyword, "switch");
        expr(*sw.scrutinee, uses);
        push_scope();
        for (const auto& c : sw.cases) {
            add(Category::Branch, c.label_span, c.is_default ? "default label" : "case label");
            for (const auto& b : c.body) stmt(b);
        }
        pop_scope();
    }

    void try_stmt(const Try& t) {
        add(Category::Exception, t.keyword, "try block");
        push_scope();
        UseSet uses;
        for (const auto& r : t.resources) {
            if (auto* d = std::get_if<LocalDecl>(&r.node)) local(*d, uses);
            else if (auto* e = std::get_if<ExprStmt>(&r.node)) expr(e->expr, uses);
        }
        stmt(*t.body);
        pop_scope();
        for (const auto& c : t.catches) {
            add(Category::Exception, c.keyword, "catch block");
            push_scope();
            declare(c.name, c.types.size() == 1 ? &c.types.front() : nullptr);
            stmt(*c.body);
            pop_scope();
        }
        if (t.finally_keyword) {
            add(Category::Exception, *t.finally_keyword, "finally block");
            stmt(*t.finally_block);
        }
    }

    void lambda(const Expr& e, const Lambda& l, UseSet& uses) {
        if (!rules_.count_lambdas) return;
        add(Category::Branch, e.span, "lambda expression");
        push_scope();
        for (const auto& p : l.params) declare(p.name, p.type ? &*p.type : nullptr);
        if (l.expr_body) expr(*l.expr_body, uses);
        if (l.block_body) stmt(*l.block_body);
        pop_scope();
    }

    void collect_bool_rhs(const Expr& e, std::vector<const Expr*>& out) {
        std::visit(overloaded{
                       [&](const BoolBinary& b) {
                           collect_bool_rhs(*b.lhs, out);
                           out.push_back(b.rhs.get());
                           collect_bool_rhs(*b.rhs, out);
                       },
                       [&](const Not& n) { collect_bool_rhs(*n.inner, out); },
                       [&](const Comparison& c) {
                           collect_bool_rhs(*c.lhs, out);
                           collect_bool_rhs(*c.rhs, out);
                       },
                       [&](const Ternary& t) {
                           collect_bool_rhs(*t.condition, out);
                           collect_bool_rhs(*t.then_expr, out);
                           collect_bool_rhs(*t.else_expr, out);
                       },
                       [&](const Call& c) {
                           if (c.receiver) collect_bool_rhs(*c.receiver, out);
                           for (const auto& a : c.args) collect_bool_rhs(a, out);
                       },
                       [&](const FieldAccess& f) { collect_bool_rhs(*f.receiver, out); },
                       [&](const New& n) {
                           for (const auto& a : n.args) collect_bool_rhs(a, out);
                       },
                       [&](const SwitchExpr& s) { collect_bool_rhs(*s.body.scrutinee, out); },
                       [&](const Compound& c) {
                           for (const auto& o : c.operands) collect_bool_rhs(o, out);
                       },
                       // lambda bodies are a separate boundary
                       [&](const auto&) {},
                   },
                   e.node);
    }

    const RuleSet& rules_;
    const SourceUnit* unit_;
    unsigned mask_;
    std::vector<IcpSite> sites_;
    std::vector<Scope> scopes_;
    std::vector<const TypeDecl*> type_chain_;
};

void analyze_type(const TypeDecl& t, const std::string& prefix, std::vector<const TypeDecl*>& outers,
                  const SourceUnit& unit, const RuleSet& rules, std::vector<UnitAnalysis>& out) {
    UnitAnalysis a;
    a.path = unit.path;
    a.type_name = prefix.empty() ? t.name : prefix + "." + t.name;
    a.package = unit.package;
    a.kind = t.kind;
    a.type_span = t.span;
    Collector c(rules, &unit, kAll);
    for (const auto* o : outers) c.enter_outer(o);
    c.type(t);
    a.sites = c.take();
    for (const auto& s : a.sites) {
        a.total += s.cost;
        a.subtotals[index_of(s.category)] += s.cost;
    }
    out.push_back(std::move(a));
    std::string name = out.back().type_name;
    outers.push_back(&t);
    for (const auto& n : t.nested) analyze_type(n, name, outers, unit, rules, out);
    outers.pop_back();
}

} // namespace

std::vector<UnitAnalysis> analyze_unit(const SourceUnit& unit, const RuleSet& rules) {
    std::vector<UnitAnalysis> out;
    std::vector<const TypeDecl*> outers;
    for (const auto& t : unit.types) analyze_type(t, "", outers, unit, rules, out);
    return out;
}

Verdict verdict(const UnitAnalysis& analysis, const RuleSet& rules) {
    Verdict v;
    v.path = analysis.path;
    v.type_name = analysis.type_name;
    v.total = analysis.total;
    v.applicable_limit = rules.limit_for(analysis.path, analysis.type_names());
    v.over_limit = v.total > v.applicable_limit;
    return v;
}

std::vector<IcpSite> count_branch_sites(const Stmt& body, const RuleSet& rules) {
    Collector c(rules, nullptr, kBranch);
    c.stmt(body);
    return c.take();
}

std::vector<IcpSite> count_condition_sites(const Expr& guard, const RuleSet& rules) {
    Collector c(rules, nullptr, kCondition);
    c.guard(guard, "guard");
    return c.take();
}

std::vector<IcpSite> count_exception_sites(const Try& stmt, const RuleSet& rules) {
    // Only this statement's blocks, not tries nested in its bodies.
    std::vector<IcpSite> all;
    const auto& rule = rules.rule(Category::Exception);
    if (!rule.enabled) return all;
    all.push_back({Category::Exception, rule.cost, stmt.keyword, "try block"});
    for (const auto& cc : stmt.catches) all.push_back({Category::Exception, rule.cost, cc.keyword, "catch block"});
    if (stmt.finally_keyword) all.push_back({Category::Exception, rule.cost, *stmt.finally_keyword, "finally block"});
    return all;
}

std::vector<IcpSite> count_coupling_sites(const TypeDecl& type, const SourceUnit& unit, const RuleSet& rules) {
    Collector c(rules, &unit, kInternal | kExternal);
    c.type(type);
    return c.take();
}

bool type_matches(const TypeRef& type, const std::vector<std::string>& patterns, const SourceUnit& unit) {
    return matches_any(type, patterns, &unit);
}

} // namespace cdd::engine
