#include "cdd/syntax/parser.hpp"

#include <fmt/format.h>

namespace cdd::syntax {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

class Dumper {
public:
    std::string out;

    void span(const Span& s) { out += fmt::format("@{}:{}", s.byte_start, s.byte_end); }

    void type(const TypeRef& t) {
        out += t.qualified_name;
        if (!t.type_args.empty()) {
            out += '<';
            for (std::size_t i = 0; i < t.type_args.size(); ++i) {
                if (i) out += ',';
                type(t.type_args[i]);
            }
            out += '>';
        }
        for (int i = 0; i < t.array_dims; ++i) out += "[]";
    }

    void annotations(const std::vector<AnnotationUse>& anns) {
        for (const auto& a : anns) {
            out += fmt::format(" @{}", a.name);
            if (a.numeric_arg) out += fmt::format("({})", a.numeric_arg->to_string());
            else if (a.raw_args) out += "(..)";
            if (a.from_comment) out += "//";
        }
    }

    void expr(const Expr& e) {
        out += '(';
        std::visit(overloaded{
                       [&](const BoolBinary& b) {
                           out += b.op == BoolOp::And ? "&& " : "|| ";
                           expr(*b.lhs);
                           expr(*b.rhs);
                       },
                       [&](const Not& n) {
                           out += "! ";
                           expr(*n.inner);
                       },
                       [&](const Comparison& c) {
                           static constexpr const char* ops[] = {"==", "!=", "<", ">", "<=", ">="};
                           out += ops[static_cast<int>(c.op)];
                           out += ' ';
                           expr(*c.lhs);
                           expr(*c.rhs);
                       },
                       [&](const Ternary& t) {
                           out += "?: ";
                           expr(*t.condition);
                           expr(*t.then_expr);
                           expr(*t.else_expr);
                       },
                       [&](const Call& c) {
                           out += "call " + c.name;
                           if (c.receiver) expr(*c.receiver);
                           for (const auto& a : c.args) expr(a);
                       },
                       [&](const NameRef& n) { out += "name " + n.name; },
                       [&](const This&) { out += "this"; },
                       [&](const FieldAccess& f) {
                           out += "field " + f.name;
                           expr(*f.receiver);
                       },
                       [&](const Lambda& l) {
                           out += "lambda";
                           for (const auto& p : l.params) out += " " + p.name;
                           if (l.expr_body) expr(*l.expr_body);
                           if (l.block_body) stmt(*l.block_body);
                       },
                       [&](const New& n) {
                           out += "new ";
                           type(n.type);
                           for (const auto& a : n.args) expr(a);
                       },
                       [&](const Literal& l) { out += "lit " + l.text; },
                       [&](const SwitchExpr& s) { switch_body(s.body); },
                       [&](const Compound& c) {
                           out += "op " + c.op;
                           if (c.type) {
                               out += ' ';
                               type(*c.type);
                           }
                           for (const auto& o : c.operands) expr(o);
                       },
                       [&](const Opaque&) { out += "opaque"; },
                   },
                   e.node);
        span(e.span);
        out += ')';
    }

    void switch_body(const SwitchBody& s) {
        out += "switch";
        expr(*s.scrutinee);
        for (const auto& c : s.cases) {
            out += c.is_default ? "[default" : "[case";
            for (const auto& l : c.labels) expr(l);
            for (const auto& st : c.body) stmt(st);
            out += ']';
        }
    }

    void stmt(const Stmt& s) {
        out += '{';
        annotations(s.markers);
        std::visit(overloaded{
                       [&](const If& i) {
                           out += "if";
                           expr(i.condition);
                           stmt(*i.then_branch);
                           if (i.else_branch) {
                               out += "else";
                               stmt(*i.else_branch);
                           }
                       },
                       [&](const Loop& l) {
                           static constexpr const char* kinds[] = {"for", "while", "do", "foreach"};
                           out += kinds[static_cast<int>(l.kind)];
                           for (const auto& i : l.init) stmt(i);
                           if (l.each_var) stmt(*l.each_var);
                           if (l.iterable) expr(*l.iterable);
                           if (l.condition) expr(*l.condition);
                           for (const auto& u : l.update) expr(u);
                           stmt(*l.body);
                       },
                       [&](const Switch& s) { switch_body(s.body); },
                       [&](const Try& t) {
                           out += "try";
                           for (const auto& r : t.resources) stmt(r);
                           stmt(*t.body);
                           for (const auto& c : t.catches) {
                               out += "catch";
                               for (const auto& ty : c.types) {
                                   out += ' ';
                                   type(ty);
                               }
                               stmt(*c.body);
                           }
                           if (t.finally_block) {
                               out += "finally";
                               stmt(*t.finally_block);
                           }
                       },
                       [&](const LocalDecl& d) {
                           out += "local " + d.name + ' ';
                           if (d.declared_type) type(*d.declared_type);
                           else out += "var";
                           annotations(d.annotations);
                           if (d.initializer) expr(*d.initializer);
                       },
                       [&](const ExprStmt& e) { expr(e.expr); },
                       [&](const Return& r) {
                           out += "return";
                           if (r.value) expr(*r.value);
                       },
                       [&](const Throw& t) {
                           out += "throw";
                           expr(t.value);
                       },
                       [&](const Block& b) {
                           out += "block";
                           for (const auto& c : b.stmts) stmt(c);
                       },
                       [&](const OtherStmt& o) {
                           out += o.kind;
                           for (const auto& e : o.exprs) expr(e);
                           for (const auto& c : o.children) stmt(c);
                       },
                   },
                   s.node);
        span(s.span);
        out += '}';
    }

    void type_decl(const TypeDecl& t, int depth) {
        std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
        out += fmt::format("{}{} {}", indent, to_string(t.kind), t.name);
        annotations(t.annotations);
        span(t.span);
        out += '\n';
        for (const auto& c : t.enum_constants) out += fmt::format("{}  const {}\n", indent, c.name);
        for (const auto& f : t.fields) {
            out += fmt::format("{}  field {} ", indent, f.name);
            type(f.declared_type);
            annotations(f.annotations);
            if (f.initializer) expr(*f.initializer);
            out += '\n';
        }
        for (const auto& m : t.methods) {
            out += fmt::format("{}  method {}", indent, m.name);
            if (m.return_type) {
                out += " -> ";
                type(*m.return_type);
            }
            for (const auto& p : m.params) {
                out += " " + p.name + ":";
                if (p.type) type(*p.type);
            }
            annotations(m.annotations);
            out += fmt::format(" lines={}", m.body_line_count);
            if (m.body) stmt(*m.body);
            out += '\n';
        }
        for (const auto& n : t.nested) type_decl(n, depth + 1);
    }
};

} // namespace

std::string dump(const SourceUnit& unit) {
    Dumper d;
    if (unit.package) d.out += "package " + *unit.package + "\n";
    for (const auto& i : unit.imports) d.out += "import " + i.name + (i.wildcard ? ".*\n" : "\n");
    for (const auto& t : unit.types) d.type_decl(t, 0);
    for (const auto& diag : unit.diagnostics)
        d.out += fmt::format("diag {}: {}\n", diag.span.line_start, diag.message);
    return d.out;
}

} // namespace cdd::syntax
