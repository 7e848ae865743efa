#pragma once

#include "cdd/points.hpp"
#include "cdd/syntax/span.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cdd::syntax {

template <class T>
using Box = std::unique_ptr<T>;

struct TypeRef {
    std::string qualified_name;
    std::vector<TypeRef> type_args;
    int array_dims = 0;
    Span span;

    std::string_view simple_name() const;
    bool is_primitive() const;
};

struct AnnotationUse {
    /// As written, possibly dotted (`com.acme.ICP`).
    std::string name;
    /// Present iff the argument list is exactly one numeric literal.
    std::optional<Decimal> numeric_arg;
    /// Raw text between the parentheses, when an argument list was written.
    std::optional<std::string> raw_args;
    std::optional<Span> args_span;
    Span span;
    /// True for `// @ICP(n)` comment markers.
    bool from_comment = false;

    std::string_view simple_name() const;
};

struct Expr;
struct Stmt;

enum class BoolOp { And, Or };
enum class CompareOp { Eq, Ne, Lt, Gt, Le, Ge };

struct Param {
    std::string name;
    /// Absent for implicitly typed lambda parameters and `var`.
    std::optional<TypeRef> type;
    std::vector<AnnotationUse> annotations;
    bool varargs = false;
    Span span;
};

struct BoolBinary {
    BoolOp op;
    Box<Expr> lhs;
    Box<Expr> rhs;
};
struct Not {
    Box<Expr> inner;
};
struct Comparison {
    CompareOp op;
    Box<Expr> lhs;
    Box<Expr> rhs;
};
struct Ternary {
    Box<Expr> condition;
    Box<Expr> then_expr;
    Box<Expr> else_expr;
};
struct Call {
    /// Null for unqualified calls.
    Box<Expr> receiver;
    std::string name;
    std::vector<Expr> args;
};
struct NameRef {
    std::string name;
};
struct This {};
struct FieldAccess {
    Box<Expr> receiver;
    std::string name;
};
struct Lambda {
    std::vector<Param> params;
    /// Exactly one of the two bodies is set.
    Box<Expr> expr_body;
    Box<Stmt> block_body;
};
struct New {
    TypeRef type;
    std::vector<Expr> args;
};
struct Literal {
    std::string text;
};

struct SwitchCase {
    bool is_default = false;
    std::vector<Expr> labels;
    /// Span of the `case`/`default` keyword.
    Span label_span;
    bool arrow = false;
    std::vector<Stmt> body;
};
struct SwitchBody {
    Box<Expr> scrutinee;
    std::vector<SwitchCase> cases;
    bool has_default = false;
    Span keyword;
};
struct SwitchExpr {
    SwitchBody body;
};

/// Supported but uncounted operators: arithmetic, assignment, casts,
/// instanceof, indexing, array creation, method references, class literals.
/// Operands are kept so nested constructs stay visible to the engine.
struct Compound {
    std::string op;
    std::vector<Expr> operands;
    std::optional<TypeRef> type;
};
/// An expression outside the supported grammar. Contents are not inspected.
struct Opaque {};

struct Expr {
    Span span;
    std::variant<BoolBinary, Not, Comparison, Ternary, Call, NameRef, This, FieldAccess, Lambda, New,
                 Literal, SwitchExpr, Compound, Opaque>
        node;
};

enum class LoopKind { For, While, DoWhile, ForEach };

struct If {
    Expr condition;
    Box<Stmt> then_branch;
    Box<Stmt> else_branch;
    Span if_keyword;
    std::optional<Span> else_keyword;
};
struct Loop {
    LoopKind kind;
    std::optional<Expr> condition;
    /// `for` init statements (local declarations or expression statements).
    std::vector<Stmt> init;
    std::vector<Expr> update;
    /// Enhanced-for variable, a LocalDecl statement.
    Box<Stmt> each_var;
    std::optional<Expr> iterable;
    Box<Stmt> body;
    Span keyword;
};
struct Switch {
    SwitchBody body;
};
struct CatchClause {
    std::vector<TypeRef> types;
    std::string name;
    Box<Stmt> body;
    Span keyword;
    Span span;
};
struct Try {
    /// LocalDecl statements, or ExprStmt for `try (existing)`.
    std::vector<Stmt> resources;
    Box<Stmt> body;
    std::vector<CatchClause> catches;
    Box<Stmt> finally_block;
    Span keyword;
    std::optional<Span> finally_keyword;
};
struct LocalDecl {
    std::string name;
    /// Absent for `var` (inferred).
    std::optional<TypeRef> declared_type;
    std::optional<Expr> initializer;
    std::vector<AnnotationUse> annotations;
    Span name_span;
};
struct ExprStmt {
    Expr expr;
};
struct Return {
    std::optional<Expr> value;
};
struct Throw {
    Expr value;
};
struct Block {
    std::vector<Stmt> stmts;
};
/// break, continue, empty, assert, yield, synchronized, explicit ctor calls.
struct OtherStmt {
    std::string kind;
    std::vector<Expr> exprs;
    std::vector<Stmt> children;
};

struct Stmt {
    Span span;
    /// `@ICP(n)` written before the statement, either as a line comment or as
    /// an annotation in a position the language does not allow.
    std::vector<AnnotationUse> markers;
    std::variant<If, Loop, Switch, Try, LocalDecl, ExprStmt, Return, Throw, Block, OtherStmt> node;
};

struct FieldDecl {
    std::string name;
    TypeRef declared_type;
    std::optional<Expr> initializer;
    std::vector<AnnotationUse> annotations;
    std::vector<std::string> modifiers;
    Span span;
};

struct MethodDecl {
    std::string name;
    std::vector<Param> params;
    /// Absent for void methods, constructors and initializer blocks.
    std::optional<TypeRef> return_type;
    bool is_constructor = false;
    bool is_initializer = false;
    std::vector<AnnotationUse> annotations;
    std::vector<std::string> modifiers;
    /// Block statement; absent for abstract and interface methods.
    Box<Stmt> body;
    Span span;
    /// From the first modifier/annotation to the end of the throws clause.
    Span signature_span;
    std::uint32_t body_line_count = 0;
};

enum class TypeKind { Class, Interface, Enum };
std::string_view to_string(TypeKind kind);

struct EnumConstant {
    std::string name;
    std::vector<Expr> args;
    Span span;
};

struct TypeDecl {
    std::string name;
    TypeKind kind = TypeKind::Class;
    std::vector<AnnotationUse> annotations;
    std::vector<std::string> modifiers;
    std::vector<TypeRef> supertypes;
    std::vector<EnumConstant> enum_constants;
    std::vector<FieldDecl> fields;
    std::vector<MethodDecl> methods;
    std::vector<TypeDecl> nested;
    Span span;
    /// First token after the annotations (a modifier or the keyword).
    Span decl_start;
    Span keyword;
};

struct Import {
    std::string name;
    bool is_static = false;
    bool wildcard = false;
    Span span;
};

struct SourceUnit {
    std::string path;
    std::optional<std::string> package;
    std::vector<Import> imports;
    std::vector<TypeDecl> types;
    std::uint32_t physical_lines = 0;
    std::uint64_t raw_text_hash = 0;
    std::vector<Diagnostic> diagnostics;
};

} // namespace cdd::syntax
