#include "cdd/syntax/parser.hpp"

#include "cdd/syntax/lexer.hpp"

#include <algorithm>
#include <array>
#include <fmt/format.h>
#include <set>

namespace cdd::syntax {

std::string_view TypeRef::simple_name() const {
    auto dot = qualified_name.rfind('.');
    return dot == std::string::npos ? std::string_view(qualified_name)
                                    : std::string_view(qualified_name).substr(dot + 1);
}

bool TypeRef::is_primitive() const {
    static constexpr std::array<std::string_view, 9> prims{
        "boolean", "byte", "char", "short", "int", "long", "float", "double", "void"};
    return std::find(prims.begin(), prims.end(), qualified_name) != prims.end();
}

std::string_view AnnotationUse::simple_name() const {
    auto dot = name.rfind('.');
    return dot == std::string::npos ? std::string_view(name) : std::string_view(name).substr(dot + 1);
}

std::string_view to_string(TypeKind kind) {
    switch (kind) {
    case TypeKind::Class: return "class";
    case TypeKind::Interface: return "interface";
    case TypeKind::Enum: return "enum";
    }
    return "?";
}

std::uint32_t physical_loc(std::string_view text) {
    return static_cast<std::uint32_t>(std::count(text.begin(), text.end(), '\n'));
}

std::uint64_t content_hash(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

struct SyntaxError {
    Span span;
    std::string message;
};

constexpr std::array<std::string_view, 13> kModifiers{
    "public", "protected", "private", "static", "abstract", "final", "native",
    "synchronized", "transient", "volatile", "strictfp", "default", "sealed"};

bool is_modifier_word(std::string_view w) {
    return std::find(kModifiers.begin(), kModifiers.end(), w) != kModifiers.end();
}

bool is_primitive_word(std::string_view w) {
    return w == "boolean" || w == "byte" || w == "char" || w == "short" || w == "int" ||
           w == "long" || w == "float" || w == "double";
}

template <class T>
Box<T> box(T value) {
    return std::make_unique<T>(std::move(value));
}

class Parser {
public:
    Parser(std::string_view text, TokenStream stream)
        : text_(text), toks_(std::move(stream.tokens)) {
        end_span_ = toks_.empty() ? Span{} : toks_.back().span;
        end_span_.byte_start = end_span_.byte_end;
        end_span_.line_start = end_span_.line_end;
    }

    SourceUnit run(std::string path) {
        SourceUnit unit;
        unit.path = std::move(path);
        unit.physical_lines = physical_loc(text_);
        unit.raw_text_hash = content_hash(text_);
        try {
            parse_header(unit);
            while (!at_end()) {
                if (accept(TokenKind::Semicolon)) continue;
                std::vector<AnnotationUse> anns;
                std::vector<std::string> mods;
                std::size_t start = pos_;
                parse_modifiers(anns, mods);
                if (!at_type_keyword())
                    throw SyntaxError{cur().span, fmt::format("expected type declaration, found '{}'", cur().text)};
                unit.types.push_back(parse_type_decl(std::move(anns), std::move(mods), start));
            }
        } catch (const SyntaxError& err) {
            diags_.push_back({err.span, err.message});
            throw ParseError(std::move(diags_));
        }
        unit.diagnostics = std::move(diags_);
        return unit;
    }

private:
    // ---- token access -------------------------------------------------

    bool at_end() const { return pos_ >= toks_.size(); }
    const Token& cur() const { return tok_at(pos_); }
    const Token& tok_at(std::size_t i) const {
        static const Token eof{TokenKind::Semicolon, Span{}, std::string_view{}, {}};
        return i < toks_.size() ? toks_[i] : eof;
    }
    const Token& ahead(std::size_t k) const { return tok_at(pos_ + k); }
    bool at(TokenKind k) const { return !at_end() && cur().kind == k; }
    bool at_kw(std::string_view kw) const { return !at_end() && cur().is_keyword(kw); }
    bool at_ident(std::string_view word) const {
        return !at_end() && cur().kind == TokenKind::Identifier && cur().text == word;
    }
    Span cur_span() const { return at_end() ? end_span_ : cur().span; }
    Span prev_span() const { return pos_ == 0 ? Span{} : toks_[pos_ - 1].span; }

    const Token& take() {
        if (at_end()) throw SyntaxError{end_span_, "unexpected end of file"};
        return toks_[pos_++];
    }
    bool accept(TokenKind k) {
        if (!at(k)) return false;
        ++pos_;
        return true;
    }
    bool accept_kw(std::string_view kw) {
        if (!at_kw(kw)) return false;
        ++pos_;
        return true;
    }
    const Token& expect(TokenKind k, std::string_view what) {
        if (!at(k))
            throw SyntaxError{cur_span(), fmt::format("expected {}, found '{}'", what,
                                                      at_end() ? std::string_view("end of file") : cur().text)};
        return toks_[pos_++];
    }
    void expect_kw(std::string_view kw) {
        if (!at_kw(kw)) throw SyntaxError{cur_span(), fmt::format("expected '{}'", kw)};
        ++pos_;
    }
    std::string expect_ident(std::string_view what) {
        // Contextual words (`var`, `record`, `yield`) lex as identifiers.
        if (at(TokenKind::Identifier)) return std::string(take().text);
        throw SyntaxError{cur_span(), fmt::format("expected {}, found '{}'", what,
                                                  at_end() ? std::string_view("end of file") : cur().text)};
    }
    bool adjacent(std::size_t i) const {
        return i + 1 < toks_.size() && toks_[i].span.byte_end == toks_[i + 1].span.byte_start;
    }

    Span span_from(std::size_t start_tok) const {
        if (pos_ == start_tok) return tok_at(start_tok).span;
        return join(tok_at(start_tok).span, toks_[pos_ - 1].span);
    }

    void warn(Span span, std::string message) { diags_.push_back({span, std::move(message)}); }

    // Skips a balanced group starting at an opening token.
    void skip_balanced() {
        int depth = 0;
        do {
            const Token& t = take();
            if (t.is(TokenKind::LParen) || t.is(TokenKind::LBrace) || t.is(TokenKind::LBracket)) ++depth;
            else if (t.is(TokenKind::RParen) || t.is(TokenKind::RBrace) || t.is(TokenKind::RBracket)) --depth;
        } while (depth > 0);
    }

    // Skips `<...>` type parameter/argument lists.
    void skip_angles() {
        int depth = 0;
        do {
            const Token& t = take();
            if (t.is(TokenKind::Lt)) ++depth;
            else if (t.is(TokenKind::Gt)) --depth;
            else if (t.is(TokenKind::Shl)) depth += 2;
            else if (t.is(TokenKind::Semicolon) || t.is(TokenKind::LBrace))
                throw SyntaxError{t.span, "unbalanced type parameter list"};
        } while (depth > 0);
    }

    // ---- recovery -----------------------------------------------------

    // Rewinds to `start` and skips one statement or member worth of tokens:
    // up to a `;` at depth 0, or through a brace group that returns to depth 0.
    void resync(std::size_t start) {
        pos_ = start;
        if (at(TokenKind::RBrace) || at_end()) return;
        int depth = 0;
        while (!at_end()) {
            const Token& t = cur();
            if (t.is(TokenKind::LParen) || t.is(TokenKind::LBrace) || t.is(TokenKind::LBracket)) {
                ++depth;
            } else if (t.is(TokenKind::RParen) || t.is(TokenKind::RBracket)) {
                if (depth > 0) --depth;
            } else if (t.is(TokenKind::RBrace)) {
                if (depth == 0) return;
                if (--depth == 0) {
                    ++pos_;
                    accept(TokenKind::Semicolon);
                    return;
                }
            } else if (t.is(TokenKind::Semicolon) && depth == 0) {
                ++pos_;
                return;
            }
            ++pos_;
        }
    }

    // ---- file header --------------------------------------------------

    std::string parse_qualified_name() {
        std::string name = expect_ident("identifier");
        while (at(TokenKind::Dot) && ahead(1).is(TokenKind::Identifier)) {
            ++pos_;
            name += '.';
            name += take().text;
        }
        return name;
    }

    void parse_header(SourceUnit& unit) {
        std::size_t start = pos_;
        std::vector<AnnotationUse> anns;
        while (at(TokenKind::At) && !ahead(1).is_keyword("interface")) anns.push_back(parse_annotation());
        if (accept_kw("package")) {
            unit.package = parse_qualified_name();
            expect(TokenKind::Semicolon, "';'");
        } else {
            pos_ = start;
        }
        while (at_kw("import")) {
            std::size_t s = pos_++;
            Import imp;
            imp.is_static = accept_kw("static");
            imp.name = parse_qualified_name();
            if (accept(TokenKind::Dot)) {
                expect(TokenKind::Star, "'*'");
                imp.wildcard = true;
            }
            expect(TokenKind::Semicolon, "';'");
            imp.span = span_from(s);
            unit.imports.push_back(std::move(imp));
        }
    }

    // ---- annotations and modifiers ------------------------------------

    AnnotationUse parse_annotation() {
        std::size_t start = pos_;
        expect(TokenKind::At, "'@'");
        AnnotationUse ann;
        ann.name = parse_qualified_name();
        if (at(TokenKind::LParen)) {
            std::size_t open = pos_;
            skip_balanced();
            std::size_t close = pos_ - 1;
            Span inner{toks_[open].span.byte_end, toks_[close].span.byte_start, toks_[open].span.line_end,
                       toks_[close].span.line_start};
            ann.args_span = inner;
            ann.raw_args = std::string(text_.substr(inner.byte_start, inner.byte_end - inner.byte_start));
            std::size_t first = open + 1;
            bool negative = false;
            if (first < close && toks_[first].is(TokenKind::Minus)) {
                negative = true;
                ++first;
            }
            if (first + 1 == close &&
                (toks_[first].is(TokenKind::Integer) || toks_[first].is(TokenKind::Decimal))) {
                std::string lit = negative ? "-" : "";
                lit += toks_[first].text;
                ann.numeric_arg = Decimal::parse(lit);
            }
        }
        ann.span = span_from(start);
        return ann;
    }

    void parse_modifiers(std::vector<AnnotationUse>& anns, std::vector<std::string>& mods) {
        for (;;) {
            if (at(TokenKind::At) && !ahead(1).is_keyword("interface")) {
                anns.push_back(parse_annotation());
            } else if (!at_end() && cur().kind == TokenKind::Keyword && is_modifier_word(cur().text)) {
                // `default:` inside switch never reaches member parsing.
                mods.emplace_back(take().text);
            } else if (at_ident("sealed") || (at_ident("non") && ahead(1).is(TokenKind::Minus))) {
                if (at_ident("non")) pos_ += 2;
                mods.emplace_back(take().text);
            } else {
                return;
            }
        }
    }

    bool at_type_keyword() const {
        return at_kw("class") || at_kw("interface") || at_kw("enum") ||
               (at(TokenKind::At) && ahead(1).is_keyword("interface"));
    }

    // ---- types --------------------------------------------------------

    void skip_type_annotations() {
        while (at(TokenKind::At) && !ahead(1).is_keyword("interface")) parse_annotation();
    }

    std::vector<TypeRef> parse_type_args() {
        std::vector<TypeRef> args;
        expect(TokenKind::Lt, "'<'");
        if (accept(TokenKind::Gt)) return args; // diamond
        for (;;) {
            skip_type_annotations();
            if (at(TokenKind::Question)) {
                // wildcards are accepted and dropped
                ++pos_;
                if (accept_kw("extends") || accept_kw("super")) args.push_back(parse_type());
            } else {
                args.push_back(parse_type());
            }
            if (!accept(TokenKind::Comma)) break;
        }
        expect(TokenKind::Gt, "'>'");
        return args;
    }

    TypeRef parse_type() {
        std::size_t start = pos_;
        skip_type_annotations();
        TypeRef ref;
        if (!at_end() && cur().kind == TokenKind::Keyword && (is_primitive_word(cur().text) || cur().text == "void")) {
            ref.qualified_name = std::string(take().text);
        } else {
            ref.qualified_name = expect_ident("type name");
            if (at(TokenKind::Lt)) ref.type_args = parse_type_args();
            while (at(TokenKind::Dot) && (ahead(1).is(TokenKind::Identifier) || ahead(1).is(TokenKind::At))) {
                ++pos_;
                skip_type_annotations();
                ref.qualified_name += '.';
                ref.qualified_name += expect_ident("type name");
                if (at(TokenKind::Lt)) ref.type_args = parse_type_args();
            }
        }
        parse_dims(ref);
        ref.span = span_from(start);
        return ref;
    }

    void parse_dims(TypeRef& ref) {
        for (;;) {
            std::size_t save = pos_;
            skip_type_annotations();
            if (at(TokenKind::LBracket) && ahead(1).is(TokenKind::RBracket)) {
                pos_ += 2;
                ++ref.array_dims;
            } else {
                pos_ = save;
                return;
            }
        }
    }

    std::vector<TypeRef> parse_type_list() {
        std::vector<TypeRef> out;
        do {
            out.push_back(parse_type());
        } while (accept(TokenKind::Comma));
        return out;
    }

    // ---- declarations -------------------------------------------------

    TypeDecl parse_type_decl(std::vector<AnnotationUse> anns, std::vector<std::string> mods, std::size_t start) {
        TypeDecl decl;
        decl.annotations = std::move(anns);
        decl.modifiers = std::move(mods);
        std::size_t first_non_ann = start;
        while (first_non_ann < pos_ && toks_[first_non_ann].is(TokenKind::At)) {
            std::size_t save = pos_;
            pos_ = first_non_ann;
            parse_annotation();
            first_non_ann = pos_;
            pos_ = save;
        }
        if (at(TokenKind::At)) {
            ++pos_;
            decl.keyword = cur().span;
            expect_kw("interface");
            decl.kind = TypeKind::Interface;
        } else {
            decl.keyword = cur().span;
            if (accept_kw("class")) decl.kind = TypeKind::Class;
            else if (accept_kw("interface")) decl.kind = TypeKind::Interface;
            else if (accept_kw("enum")) decl.kind = TypeKind::Enum;
            else throw SyntaxError{cur_span(), "expected class, interface or enum"};
        }
        decl.decl_start = first_non_ann < pos_ ? toks_[first_non_ann].span : decl.keyword;
        decl.name = expect_ident("type name");
        if (at(TokenKind::Lt)) skip_angles();
        if (accept_kw("extends")) decl.supertypes = parse_type_list();
        if (accept_kw("implements")) {
            auto more = parse_type_list();
            std::move(more.begin(), more.end(), std::back_inserter(decl.supertypes));
        }
        if (at_ident("permits")) {
            ++pos_;
            parse_type_list();
        }
        if (!at(TokenKind::LBrace)) throw SyntaxError{cur_span(), "expected '{' to open type body"};
        parse_type_body(decl);
        decl.span = span_from(start);
        return decl;
    }

    void parse_type_body(TypeDecl& decl) {
        expect(TokenKind::LBrace, "'{'");
        if (decl.kind == TypeKind::Enum) parse_enum_constants(decl);
        std::set<std::string> nested_names;
        while (!at(TokenKind::RBrace)) {
            if (at_end()) throw SyntaxError{end_span_, fmt::format("unterminated body of '{}'", decl.name)};
            if (accept(TokenKind::Semicolon)) continue;
            std::size_t start = pos_;
            try {
                parse_member(decl, nested_names);
            } catch (const SyntaxError& err) {
                warn(err.span, fmt::format("skipped member: {}", err.message));
                resync(start);
                if (pos_ == start) ++pos_;
            }
        }
        expect(TokenKind::RBrace, "'}'");
    }

    void parse_enum_constants(TypeDecl& decl) {
        while (at(TokenKind::Identifier) || at(TokenKind::At)) {
            std::size_t start = pos_;
            while (at(TokenKind::At)) parse_annotation();
            EnumConstant c;
            c.name = expect_ident("enum constant");
            if (at(TokenKind::LParen)) c.args = parse_arguments();
            if (at(TokenKind::LBrace)) {
                std::size_t body_start = pos_;
                skip_balanced();
                warn(span_from(body_start), fmt::format("enum constant body of '{}' not analyzed", c.name));
            }
            c.span = span_from(start);
            decl.enum_constants.push_back(std::move(c));
            if (!accept(TokenKind::Comma)) break;
        }
        if (!at(TokenKind::RBrace)) expect(TokenKind::Semicolon, "';' after enum constants");
    }

    void parse_member(TypeDecl& decl, std::set<std::string>& nested_names) {
        std::size_t start = pos_;
        std::vector<AnnotationUse> anns;
        std::vector<std::string> mods;
        parse_modifiers(anns, mods);

        if (at(TokenKind::LBrace)) {
            MethodDecl init;
            init.name = std::find(mods.begin(), mods.end(), "static") != mods.end() ? "<clinit>" : "<init>";
            init.is_initializer = true;
            init.modifiers = std::move(mods);
            init.signature_span = span_from(start);
            init.body = box(parse_block());
            init.body_line_count = init.body->span.line_count();
            init.span = span_from(start);
            decl.methods.push_back(std::move(init));
            return;
        }
        if (at_type_keyword()) {
            TypeDecl nested = parse_type_decl(std::move(anns), std::move(mods), start);
            if (!nested_names.insert(nested.name).second) {
                warn(nested.span, fmt::format("duplicate nested type '{}' ignored", nested.name));
                return;
            }
            decl.nested.push_back(std::move(nested));
            return;
        }
        if (at_ident("record") && ahead(1).is(TokenKind::Identifier))
            throw SyntaxError{cur_span(), "record declarations are not supported"};

        if (at(TokenKind::Lt)) skip_angles();

        if (at(TokenKind::Identifier) && cur().text == decl.name && ahead(1).is(TokenKind::LParen)) {
            MethodDecl ctor;
            ctor.name = std::string(take().text);
            ctor.is_constructor = true;
            parse_method_rest(ctor, std::move(anns), std::move(mods), start);
            decl.methods.push_back(std::move(ctor));
            return;
        }

        TypeRef type = parse_type();
        std::string name = expect_ident("member name");
        if (at(TokenKind::LParen)) {
            MethodDecl m;
            m.name = std::move(name);
            if (type.qualified_name != "void" || type.array_dims > 0) m.return_type = std::move(type);
            parse_method_rest(m, std::move(anns), std::move(mods), start);
            decl.methods.push_back(std::move(m));
            return;
        }

        // Field declarators share annotations, modifiers and base type.
        for (;;) {
            FieldDecl f;
            f.name = std::move(name);
            f.declared_type = type;
            parse_dims(f.declared_type);
            f.annotations = anns;
            f.modifiers = mods;
            if (accept(TokenKind::Assign)) f.initializer = parse_var_initializer();
            f.span = span_from(start);
            decl.fields.push_back(std::move(f));
            if (!accept(TokenKind::Comma)) break;
            name = expect_ident("field name");
        }
        expect(TokenKind::Semicolon, "';' after field");
        if (!decl.fields.empty()) decl.fields.back().span = span_from(start);
    }

    void parse_method_rest(MethodDecl& m, std::vector<AnnotationUse> anns, std::vector<std::string> mods,
                           std::size_t start) {
        m.annotations = std::move(anns);
        m.modifiers = std::move(mods);
        m.params = parse_params();
        if (m.return_type) parse_dims(*m.return_type);
        if (accept_kw("throws")) parse_type_list();
        m.signature_span = span_from(start);
        if (at(TokenKind::LBrace)) {
            m.body = box(parse_block());
            m.body_line_count = m.body->span.line_count();
        } else {
            if (accept_kw("default")) parse_expr();
            expect(TokenKind::Semicolon, "';' or method body");
        }
        m.span = span_from(start);
    }

    std::vector<Param> parse_params() {
        expect(TokenKind::LParen, "'('");
        std::vector<Param> params;
        if (accept(TokenKind::RParen)) return params;
        do {
            std::size_t start = pos_;
            Param p;
            std::vector<std::string> mods;
            parse_modifiers(p.annotations, mods);
            TypeRef t = parse_type();
            if (accept(TokenKind::Ellipsis)) {
                p.varargs = true;
                ++t.array_dims;
            }
            if (at_kw("this")) {
                // receiver parameter
                ++pos_;
                continue;
            }
            p.name = expect_ident("parameter name");
            parse_dims(t);
            if (t.qualified_name != "var") p.type = std::move(t);
            p.span = span_from(start);
            params.push_back(std::move(p));
        } while (accept(TokenKind::Comma));
        expect(TokenKind::RParen, "')'");
        return params;
    }

    Expr parse_var_initializer() {
        if (at(TokenKind::LBrace)) return parse_array_initializer();
        return parse_expr();
    }

    Expr parse_array_initializer() {
        std::size_t start = pos_;
        expect(TokenKind::LBrace, "'{'");
        Compound c{"{}", {}, std::nullopt};
        while (!at(TokenKind::RBrace)) {
            c.operands.push_back(parse_var_initializer());
            if (!accept(TokenKind::Comma)) break;
        }
        expect(TokenKind::RBrace, "'}'");
        return Expr{span_from(start), std::move(c)};
    }

    // ---- statements ---------------------------------------------------

    Stmt parse_block() {
        std::size_t start = pos_;
        expect(TokenKind::LBrace, "'{'");
        Block block;
        while (!at(TokenKind::RBrace)) {
            if (at_end()) throw SyntaxError{end_span_, "unterminated block"};
            parse_block_statement_recovering(block.stmts);
        }
        ++pos_;
        return Stmt{span_from(start), {}, std::move(block)};
    }

    void parse_block_statement_recovering(std::vector<Stmt>& out) {
        std::size_t start = pos_;
        std::size_t before = out.size();
        try {
            parse_block_statement(out);
        } catch (const SyntaxError& err) {
            out.resize(before);
            warn(err.span, fmt::format("unparsed statement: {}", err.message));
            resync(start);
            if (pos_ == start) ++pos_;
            out.push_back(Stmt{span_from(start), comment_markers(start), ExprStmt{Expr{span_from(start), Opaque{}}}});
        }
    }

    // `// @ICP(n)` line comments in the trivia before token `tok`.
    std::vector<AnnotationUse> comment_markers(std::size_t tok) const {
        std::vector<AnnotationUse> out;
        if (tok >= toks_.size()) return out;
        for (const Trivia& tr : toks_[tok].leading) {
            if (tr.kind != TriviaKind::LineComment) continue;
            std::string_view c = text_.substr(tr.span.byte_start, tr.span.byte_end - tr.span.byte_start);
            c.remove_prefix(2);
            auto trim = [](std::string_view s) {
                while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
                while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
                return s;
            };
            c = trim(c);
            if (!c.starts_with("@ICP")) continue;
            std::string_view rest = trim(c.substr(4));
            AnnotationUse ann;
            ann.name = "ICP";
            ann.from_comment = true;
            ann.span = tr.span;
            if (rest.starts_with("(") && rest.ends_with(")")) {
                std::string_view inner = trim(rest.substr(1, rest.size() - 2));
                ann.raw_args = std::string(inner);
                ann.numeric_arg = Decimal::parse(inner);
            } else if (!rest.empty()) {
                continue;
            }
            out.push_back(std::move(ann));
        }
        return out;
    }

    bool at_local_decl_start() {
        std::size_t save = pos_;
        bool result = false;
        if (at_ident("var") && ahead(1).is(TokenKind::Identifier)) {
            result = true;
        } else if (at(TokenKind::Identifier) || (!at_end() && cur().kind == TokenKind::Keyword &&
                                                  is_primitive_word(cur().text))) {
            try {
                parse_type();
                if (at(TokenKind::Identifier)) {
                    const Token& next = ahead(1);
                    result = next.is(TokenKind::Assign) || next.is(TokenKind::Semicolon) ||
                             next.is(TokenKind::Comma) || next.is(TokenKind::LBracket) || next.is(TokenKind::Colon);
                }
            } catch (const SyntaxError&) {
                result = false;
            }
        }
        pos_ = save;
        return result;
    }

    // Local declarations with several declarators push one LocalDecl each.
    void parse_local_decls(std::vector<Stmt>& out, std::vector<AnnotationUse> anns, std::vector<AnnotationUse> markers,
                           std::size_t start, bool require_semicolon) {
        std::optional<TypeRef> type;
        if (at_ident("var") && ahead(1).is(TokenKind::Identifier)) {
            ++pos_;
        } else {
            type = parse_type();
        }
        std::size_t first = out.size();
        for (;;) {
            LocalDecl d;
            d.name_span = cur_span();
            d.name = expect_ident("variable name");
            d.declared_type = type;
            if (d.declared_type) parse_dims(*d.declared_type);
            d.annotations = anns;
            if (accept(TokenKind::Assign)) d.initializer = parse_var_initializer();
            out.push_back(Stmt{span_from(start), {}, std::move(d)});
            if (!accept(TokenKind::Comma)) break;
        }
        if (require_semicolon) expect(TokenKind::Semicolon, "';' after declaration");
        out[first].markers = std::move(markers);
        out.back().span = span_from(start);
    }

    void parse_block_statement(std::vector<Stmt>& out) {
        std::size_t start = pos_;
        std::vector<AnnotationUse> markers = comment_markers(pos_);
        std::vector<AnnotationUse> anns;
        std::vector<std::string> mods;
        while (at(TokenKind::At) || at_kw("final") || at_kw("abstract") || at_kw("static"))
            parse_modifiers(anns, mods);

        if (at_type_keyword() || (at_ident("record") && ahead(1).is(TokenKind::Identifier)))
            throw SyntaxError{cur_span(), "local type declarations are not supported"};

        if (at_local_decl_start()) {
            parse_local_decls(out, std::move(anns), std::move(markers), start, true);
            return;
        }
        if (!mods.empty()) throw SyntaxError{cur_span(), "expected declaration after modifiers"};
        // Annotations in front of a non-declaration are kept as markers.
        for (auto& a : anns) markers.push_back(std::move(a));
        Stmt s = parse_statement();
        s.markers = std::move(markers);
        s.span = span_from(start);
        out.push_back(std::move(s));
    }

    Box<Stmt> parse_sub_statement() {
        // if/loop bodies: a single statement, never a bare declaration.
        std::size_t start = pos_;
        std::vector<Stmt> tmp;
        parse_block_statement_recovering(tmp);
        if (tmp.size() == 1) return box(std::move(tmp.front()));
        Block b;
        b.stmts = std::move(tmp);
        return box(Stmt{span_from(start), {}, std::move(b)});
    }

    Expr parse_paren_expr() {
        expect(TokenKind::LParen, "'('");
        Expr e = parse_expr();
        expect(TokenKind::RParen, "')'");
        return e;
    }

    Stmt parse_statement() {
        std::size_t start = pos_;
        auto finish = [&](auto node) { return Stmt{span_from(start), {}, std::move(node)}; };

        if (at(TokenKind::LBrace)) return parse_block();
        if (accept(TokenKind::Semicolon)) return finish(OtherStmt{"empty", {}, {}});

        if (at_kw("if")) {
            If s{Expr{}, nullptr, nullptr, take().span, std::nullopt};
            s.condition = parse_paren_expr();
            s.then_branch = parse_sub_statement();
            if (at_kw("else")) {
                s.else_keyword = take().span;
                s.else_branch = parse_sub_statement();
            }
            return finish(std::move(s));
        }
        if (at_kw("while")) {
            Loop l{LoopKind::While, std::nullopt, {}, {}, nullptr, std::nullopt, nullptr, take().span};
            l.condition = parse_paren_expr();
            l.body = parse_sub_statement();
            return finish(std::move(l));
        }
        if (at_kw("do")) {
            Loop l{LoopKind::DoWhile, std::nullopt, {}, {}, nullptr, std::nullopt, nullptr, take().span};
            l.body = parse_sub_statement();
            expect_kw("while");
            l.condition = parse_paren_expr();
            expect(TokenKind::Semicolon, "';' after do-while");
            return finish(std::move(l));
        }
        if (at_kw("for")) return finish(parse_for());
        if (at_kw("switch")) {
            Switch s{parse_switch_body()};
            return finish(std::move(s));
        }
        if (at_kw("try")) return finish(parse_try());
        if (accept_kw("return")) {
            Return r;
            if (!at(TokenKind::Semicolon)) r.value = parse_expr();
            expect(TokenKind::Semicolon, "';' after return");
            return finish(std::move(r));
        }
        if (accept_kw("throw")) {
            Throw t{parse_expr()};
            expect(TokenKind::Semicolon, "';' after throw");
            return finish(std::move(t));
        }
        if (at_kw("break") || at_kw("continue")) {
            std::string kind(take().text);
            if (at(TokenKind::Identifier)) ++pos_;
            expect(TokenKind::Semicolon, "';'");
            return finish(OtherStmt{kind, {}, {}});
        }
        if (accept_kw("synchronized")) {
            OtherStmt o{"synchronized", {}, {}};
            o.exprs.push_back(parse_paren_expr());
            o.children.push_back(parse_block());
            return finish(std::move(o));
        }
        if (accept_kw("assert")) {
            OtherStmt o{"assert", {}, {}};
            o.exprs.push_back(parse_expr());
            if (accept(TokenKind::Colon)) o.exprs.push_back(parse_expr());
            expect(TokenKind::Semicolon, "';' after assert");
            return finish(std::move(o));
        }
        if (at_ident("yield") && !ahead(1).is(TokenKind::Assign) && !ahead(1).is(TokenKind::Dot) &&
            !ahead(1).is(TokenKind::LParen)) {
            ++pos_;
            OtherStmt o{"yield", {}, {}};
            o.exprs.push_back(parse_expr());
            expect(TokenKind::Semicolon, "';' after yield");
            return finish(std::move(o));
        }
        if (at(TokenKind::Identifier) && ahead(1).is(TokenKind::Colon)) {
            // labeled statement; the label itself carries nothing
            pos_ += 2;
            return parse_statement();
        }
        Expr e = parse_expr();
        expect(TokenKind::Semicolon, "';' after expression");
        return finish(ExprStmt{std::move(e)});
    }

    Loop parse_for() {
        Loop l{LoopKind::For, std::nullopt, {}, {}, nullptr, std::nullopt, nullptr, take().span};
        expect(TokenKind::LParen, "'('");
        std::size_t init_start = pos_;
        std::vector<AnnotationUse> anns;
        std::vector<std::string> mods;
        parse_modifiers(anns, mods);
        if (at_local_decl_start()) {
            std::vector<Stmt> decls;
            parse_local_decls(decls, anns, {}, init_start, false);
            if (accept(TokenKind::Colon)) {
                if (decls.size() != 1) throw SyntaxError{cur_span(), "malformed enhanced for"};
                l.kind = LoopKind::ForEach;
                l.each_var = box(std::move(decls.front()));
                l.iterable = parse_expr();
                expect(TokenKind::RParen, "')'");
                l.body = parse_sub_statement();
                return l;
            }
            l.init = std::move(decls);
        } else if (!at(TokenKind::Semicolon)) {
            do {
                std::size_t s = pos_;
                Expr e = parse_expr();
                l.init.push_back(Stmt{span_from(s), {}, ExprStmt{std::move(e)}});
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::Semicolon, "';' in for");
        if (!at(TokenKind::Semicolon)) l.condition = parse_expr();
        expect(TokenKind::Semicolon, "';' in for");
        if (!at(TokenKind::RParen)) {
            do {
                l.update.push_back(parse_expr());
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RParen, "')'");
        l.body = parse_sub_statement();
        return l;
    }

    SwitchBody parse_switch_body() {
        SwitchBody sw;
        sw.keyword = take().span;
        sw.scrutinee = box(parse_paren_expr());
        expect(TokenKind::LBrace, "'{' after switch");
        while (!at(TokenKind::RBrace)) {
            if (at_end()) throw SyntaxError{end_span_, "unterminated switch"};
            SwitchCase c;
            c.label_span = cur_span();
            if (accept_kw("default")) {
                c.is_default = true;
                sw.has_default = true;
            } else if (accept_kw("case")) {
                do {
                    if (at_kw("default")) {
                        ++pos_;
                        sw.has_default = true;
                        continue;
                    }
                    in_case_label_ = true;
                    try {
                        c.labels.push_back(parse_ternary());
                    } catch (...) {
                        in_case_label_ = false;
                        throw;
                    }
                    in_case_label_ = false;
                } while (accept(TokenKind::Comma));
            } else {
                throw SyntaxError{cur_span(), "expected 'case' or 'default'"};
            }
            if (accept(TokenKind::Arrow)) {
                c.arrow = true;
                if (at(TokenKind::LBrace)) {
                    c.body.push_back(parse_block());
                } else if (at_kw("throw")) {
                    c.body.push_back(parse_statement());
                } else {
                    std::size_t s = pos_;
                    Expr e = parse_expr();
                    expect(TokenKind::Semicolon, "';' after case expression");
                    c.body.push_back(Stmt{span_from(s), {}, ExprStmt{std::move(e)}});
                }
            } else {
                expect(TokenKind::Colon, "':' or '->' after case label");
                while (!at(TokenKind::RBrace) && !at_kw("case") && !at_kw("default")) {
                    if (at_end()) throw SyntaxError{end_span_, "unterminated switch"};
                    parse_block_statement_recovering(c.body);
                }
            }
            sw.cases.push_back(std::move(c));
        }
        ++pos_;
        return sw;
    }

    Try parse_try() {
        Try t;
        t.keyword = take().span;
        if (accept(TokenKind::LParen)) {
            while (!at(TokenKind::RParen)) {
                std::size_t s = pos_;
                std::vector<AnnotationUse> anns;
                std::vector<std::string> mods;
                parse_modifiers(anns, mods);
                if (at_local_decl_start()) {
                    parse_local_decls(t.resources, std::move(anns), {}, s, false);
                } else {
                    Expr e = parse_expr();
                    t.resources.push_back(Stmt{span_from(s), {}, ExprStmt{std::move(e)}});
                }
                if (!accept(TokenKind::Semicolon)) break;
            }
            expect(TokenKind::RParen, "')' after resources");
        }
        t.body = box(parse_block());
        while (at_kw("catch")) {
            std::size_t s = pos_;
            CatchClause c;
            c.keyword = take().span;
            expect(TokenKind::LParen, "'('");
            std::vector<AnnotationUse> anns;
            std::vector<std::string> mods;
            parse_modifiers(anns, mods);
            c.types.push_back(parse_type());
            while (accept(TokenKind::Pipe)) c.types.push_back(parse_type());
            c.name = expect_ident("catch parameter");
            expect(TokenKind::RParen, "')'");
            c.body = box(parse_block());
            c.span = span_from(s);
            t.catches.push_back(std::move(c));
        }
        if (at_kw("finally")) {
            t.finally_keyword = take().span;
            t.finally_block = box(parse_block());
        }
        if (t.catches.empty() && !t.finally_block && t.resources.empty())
            throw SyntaxError{cur_span(), "try without catch or finally"};
        return t;
    }

    // ---- expressions --------------------------------------------------

    Expr make(std::size_t start, auto node) { return Expr{span_from(start), std::move(node)}; }

    Expr parse_expr() { return parse_assignment(); }

    bool at_assignment_op() const {
        if (at(TokenKind::Assign) || at(TokenKind::CompoundAssign)) return true;
        // `>>=` and `>>>=` arrive split into Gt tokens
        if (at(TokenKind::Gt) && adjacent(pos_)) {
            const Token& n = ahead(1);
            if (n.is(TokenKind::GtEq)) return true;
            if (n.is(TokenKind::Gt) && adjacent(pos_ + 1) && ahead(2).is(TokenKind::GtEq)) return true;
        }
        return false;
    }

    Expr parse_assignment() {
        std::size_t start = pos_;
        Expr lhs = parse_ternary();
        if (at_assignment_op()) {
            std::string op;
            while (at(TokenKind::Gt)) op += take().text;
            op += take().text;
            Expr rhs = parse_assignment();
            Compound c{op, {}, std::nullopt};
            c.operands.push_back(std::move(lhs));
            c.operands.push_back(std::move(rhs));
            return make(start, std::move(c));
        }
        return lhs;
    }

    Expr parse_ternary() {
        std::size_t start = pos_;
        Expr cond = parse_binary(0);
        if (!accept(TokenKind::Question)) return cond;
        Expr then_e = parse_expr();
        expect(TokenKind::Colon, "':' in conditional expression");
        Expr else_e = at_lambda_start() ? parse_lambda() : parse_ternary();
        return make(start, Ternary{box(std::move(cond)), box(std::move(then_e)), box(std::move(else_e))});
    }

    // Binary precedence levels from loosest to tightest.
    enum Level { LOr, LAnd, LBitOr, LXor, LBitAnd, LEquality, LRelational, LShift, LAdditive, LMultiplicative, LUnary };

    // Returns the operator text when the current token is a binary operator of `level`.
    std::optional<std::string> binary_op_at(int level) const {
        if (at_end()) return std::nullopt;
        const Token& t = cur();
        switch (level) {
        case LOr: if (t.is(TokenKind::OrOr)) return "||"; break;
        case LAnd: if (t.is(TokenKind::AndAnd)) return "&&"; break;
        case LBitOr: if (t.is(TokenKind::Pipe)) return "|"; break;
        case LXor: if (t.is(TokenKind::Caret)) return "^"; break;
        case LBitAnd: if (t.is(TokenKind::Amp)) return "&"; break;
        case LEquality:
            if (t.is(TokenKind::EqEq)) return "==";
            if (t.is(TokenKind::NotEq)) return "!=";
            break;
        case LRelational:
            if (t.is(TokenKind::Lt)) return "<";
            if (t.is(TokenKind::LtEq)) return "<=";
            if (t.is(TokenKind::GtEq)) return ">=";
            if (t.is(TokenKind::Gt)) {
                if (adjacent(pos_) && (ahead(1).is(TokenKind::Gt) || ahead(1).is(TokenKind::GtEq))) break;
                return ">";
            }
            if (t.is_keyword("instanceof")) return "instanceof";
            break;
        case LShift:
            if (t.is(TokenKind::Shl)) return "<<";
            if (t.is(TokenKind::Gt) && adjacent(pos_) && ahead(1).is(TokenKind::Gt)) {
                if (adjacent(pos_ + 1) && ahead(2).is(TokenKind::Gt)) {
                    if (adjacent(pos_ + 2) && ahead(3).is(TokenKind::GtEq)) break;
                    return ">>>";
                }
                if (adjacent(pos_ + 1) && ahead(2).is(TokenKind::GtEq)) break;
                return ">>";
            }
            break;
        case LAdditive:
            if (t.is(TokenKind::Plus)) return "+";
            if (t.is(TokenKind::Minus)) return "-";
            break;
        case LMultiplicative:
            if (t.is(TokenKind::Star)) return "*";
            if (t.is(TokenKind::Slash)) return "/";
            if (t.is(TokenKind::Percent)) return "%";
            break;
        default: break;
        }
        return std::nullopt;
    }

    Expr parse_binary(int level) {
        if (level == LUnary) return parse_unary();
        std::size_t start = pos_;
        Expr lhs = parse_binary(level + 1);
        while (auto op = binary_op_at(level)) {
            if (*op == ">>" ) pos_ += 2;
            else if (*op == ">>>") pos_ += 3;
            else ++pos_;
            if (*op == "instanceof") {
                accept_kw("final");
                Compound c{"instanceof", {}, parse_type()};
                if (at(TokenKind::Identifier)) ++pos_; // pattern binding
                c.operands.push_back(std::move(lhs));
                lhs = make(start, std::move(c));
                continue;
            }
            Expr rhs = parse_binary(level + 1);
            if (level == LOr || level == LAnd) {
                lhs = make(start, BoolBinary{level == LOr ? BoolOp::Or : BoolOp::And, box(std::move(lhs)),
                                             box(std::move(rhs))});
            } else if (level == LEquality || level == LRelational) {
                CompareOp cop = *op == "==" ? CompareOp::Eq
                              : *op == "!=" ? CompareOp::Ne
                              : *op == "<"  ? CompareOp::Lt
                              : *op == ">"  ? CompareOp::Gt
                              : *op == "<=" ? CompareOp::Le
                                            : CompareOp::Ge;
                lhs = make(start, Comparison{cop, box(std::move(lhs)), box(std::move(rhs))});
            } else {
                Compound c{*op, {}, std::nullopt};
                c.operands.push_back(std::move(lhs));
                c.operands.push_back(std::move(rhs));
                lhs = make(start, std::move(c));
            }
        }
        return lhs;
    }

    Expr parse_unary() {
        std::size_t start = pos_;
        if (accept(TokenKind::Not)) return make(start, Not{box(parse_unary())});
        if (at(TokenKind::Minus) || at(TokenKind::Plus) || at(TokenKind::Tilde) || at(TokenKind::PlusPlus) ||
            at(TokenKind::MinusMinus)) {
            Compound c{std::string(take().text), {}, std::nullopt};
            c.operands.push_back(parse_unary());
            return make(start, std::move(c));
        }
        if (at(TokenKind::LParen) && !at_lambda_start()) {
            if (auto cast = try_cast()) return std::move(*cast);
        }
        return parse_postfix(parse_primary());
    }

    std::optional<Expr> try_cast() {
        std::size_t start = pos_;
        ++pos_;
        TypeRef type;
        try {
            type = parse_type();
            while (accept(TokenKind::Amp)) parse_type();
        } catch (const SyntaxError&) {
            pos_ = start;
            return std::nullopt;
        }
        if (!accept(TokenKind::RParen)) {
            pos_ = start;
            return std::nullopt;
        }
        bool primitive = type.is_primitive() && type.qualified_name != "void";
        bool operand_follows = false;
        if (!at_end()) {
            const Token& t = cur();
            operand_follows = t.is(TokenKind::Identifier) || t.is(TokenKind::Integer) || t.is(TokenKind::Decimal) ||
                              t.is(TokenKind::String) || t.is(TokenKind::Char) || t.is(TokenKind::TextBlock) ||
                              t.is(TokenKind::LParen) || t.is(TokenKind::Not) || t.is(TokenKind::Tilde) ||
                              t.is_keyword("this") || t.is_keyword("super") || t.is_keyword("new") ||
                              t.is_keyword("true") || t.is_keyword("false") || t.is_keyword("null") ||
                              t.is_keyword("switch") ||
                              (t.kind == TokenKind::Keyword && is_primitive_word(t.text));
            if (primitive && (t.is(TokenKind::Minus) || t.is(TokenKind::Plus) || t.is(TokenKind::PlusPlus) ||
                              t.is(TokenKind::MinusMinus)))
                operand_follows = true;
        }
        if (!operand_follows) {
            pos_ = start;
            return std::nullopt;
        }
        Compound c{"cast", {}, std::move(type)};
        c.operands.push_back(at_lambda_start() ? parse_lambda() : parse_unary());
        return make(start, std::move(c));
    }

    std::vector<Expr> parse_arguments() {
        expect(TokenKind::LParen, "'('");
        std::vector<Expr> args;
        if (accept(TokenKind::RParen)) return args;
        do {
            args.push_back(parse_expr());
        } while (accept(TokenKind::Comma));
        expect(TokenKind::RParen, "')' after arguments");
        return args;
    }

    bool at_lambda_start() const {
        if (in_case_label_) return false;
        if (at(TokenKind::Identifier) && ahead(1).is(TokenKind::Arrow)) return true;
        if (!at(TokenKind::LParen)) return false;
        int depth = 0;
        for (std::size_t i = pos_; i < toks_.size(); ++i) {
            if (toks_[i].is(TokenKind::LParen)) ++depth;
            else if (toks_[i].is(TokenKind::RParen) && --depth == 0)
                return i + 1 < toks_.size() && toks_[i + 1].is(TokenKind::Arrow);
            else if (toks_[i].is(TokenKind::Semicolon) || toks_[i].is(TokenKind::LBrace) ||
                     toks_[i].is(TokenKind::RBrace))
                return false;
        }
        return false;
    }

    Expr parse_lambda() {
        std::size_t start = pos_;
        Lambda lam;
        if (at(TokenKind::Identifier)) {
            Param p;
            p.span = cur().span;
            p.name = std::string(take().text);
            lam.params.push_back(std::move(p));
        } else {
            expect(TokenKind::LParen, "'('");
            while (!at(TokenKind::RParen)) {
                std::size_t ps = pos_;
                Param p;
                std::vector<std::string> mods;
                parse_modifiers(p.annotations, mods);
                if (at(TokenKind::Identifier) && (ahead(1).is(TokenKind::Comma) || ahead(1).is(TokenKind::RParen))) {
                    p.name = std::string(take().text);
                } else {
                    TypeRef t = parse_type();
                    if (accept(TokenKind::Ellipsis)) ++t.array_dims;
                    p.name = expect_ident("lambda parameter");
                    if (t.qualified_name != "var") p.type = std::move(t);
                }
                p.span = span_from(ps);
                lam.params.push_back(std::move(p));
                if (!accept(TokenKind::Comma)) break;
            }
            expect(TokenKind::RParen, "')'");
        }
        expect(TokenKind::Arrow, "'->'");
        if (at(TokenKind::LBrace)) lam.block_body = box(parse_block());
        else lam.expr_body = box(parse_expr());
        return make(start, std::move(lam));
    }

    Expr parse_primary() {
        std::size_t start = pos_;
        if (at_end()) throw SyntaxError{end_span_, "unexpected end of file in expression"};
        if (at_lambda_start()) return parse_lambda();
        const Token& t = cur();
        switch (t.kind) {
        case TokenKind::Integer:
        case TokenKind::Decimal:
        case TokenKind::String:
        case TokenKind::Char:
        case TokenKind::TextBlock:
            ++pos_;
            return make(start, Literal{std::string(t.text)});
        case TokenKind::LParen: {
            ++pos_;
            Expr inner = parse_expr();
            expect(TokenKind::RParen, "')'");
            inner.span = span_from(start);
            return inner;
        }
        case TokenKind::Identifier: {
            std::string name(take().text);
            if (at(TokenKind::LParen)) return make(start, Call{nullptr, std::move(name), parse_arguments()});
            if (at(TokenKind::LBracket) && ahead(1).is(TokenKind::RBracket)) return parse_type_suffix_expr(start);
            if (at(TokenKind::Lt)) {
                // `List<String>::size` style method references
                std::size_t save = pos_;
                try {
                    pos_ = start;
                    TypeRef type = parse_type();
                    if (at(TokenKind::ColonColon)) {
                        ++pos_;
                        Compound c{"::", {}, std::move(type)};
                        if (!accept_kw("new")) expect_ident("method name");
                        return make(start, std::move(c));
                    }
                } catch (const SyntaxError&) {
                }
                pos_ = save;
            }
            return make(start, NameRef{std::move(name)});
        }
        case TokenKind::Keyword:
            break;
        case TokenKind::At:
            throw SyntaxError{t.span, "annotation in expression position"};
        default:
            throw SyntaxError{t.span, fmt::format("unexpected '{}' in expression", t.text)};
        }

        if (t.text == "true" || t.text == "false" || t.text == "null") {
            ++pos_;
            return make(start, Literal{std::string(t.text)});
        }
        if (t.text == "this") {
            ++pos_;
            if (at(TokenKind::LParen)) return make(start, Call{nullptr, "this", parse_arguments()});
            return make(start, This{});
        }
        if (t.text == "super") {
            ++pos_;
            if (at(TokenKind::LParen)) return make(start, Call{nullptr, "super", parse_arguments()});
            return make(start, NameRef{"super"});
        }
        if (t.text == "new") return parse_new();
        if (t.text == "switch") return make(start, SwitchExpr{parse_switch_body()});
        if (is_primitive_word(t.text) || t.text == "void") return parse_type_suffix_expr(start);
        throw SyntaxError{t.span, fmt::format("unexpected '{}' in expression", t.text)};
    }

    // `int.class`, `int[]::new`, `String[].class`.
    Expr parse_type_suffix_expr(std::size_t start) {
        pos_ = start;
        TypeRef type = parse_type();
        if (accept(TokenKind::Dot)) {
            expect_kw("class");
            return make(start, Compound{"class", {}, std::move(type)});
        }
        if (accept(TokenKind::ColonColon)) {
            if (!accept_kw("new")) expect_ident("method name");
            return make(start, Compound{"::", {}, std::move(type)});
        }
        throw SyntaxError{cur_span(), "type used as expression"};
    }

    Expr parse_new() {
        std::size_t start = pos_;
        expect_kw("new");
        if (at(TokenKind::Lt)) skip_angles();
        std::size_t type_start = pos_;
        skip_type_annotations();
        TypeRef type;
        if (!at_end() && cur().kind == TokenKind::Keyword && is_primitive_word(cur().text)) {
            type.qualified_name = std::string(take().text);
        } else {
            type.qualified_name = expect_ident("type name");
            if (at(TokenKind::Lt)) type.type_args = parse_type_args();
            while (at(TokenKind::Dot) && ahead(1).is(TokenKind::Identifier)) {
                ++pos_;
                type.qualified_name += '.';
                type.qualified_name += take().text;
                if (at(TokenKind::Lt)) type.type_args = parse_type_args();
            }
        }
        type.span = span_from(type_start);
        if (at(TokenKind::LBracket)) {
            Compound c{"new[]", {}, std::nullopt};
            while (at(TokenKind::LBracket)) {
                ++pos_;
                if (!at(TokenKind::RBracket)) c.operands.push_back(parse_expr());
                expect(TokenKind::RBracket, "']'");
                ++type.array_dims;
            }
            if (at(TokenKind::LBrace)) c.operands.push_back(parse_array_initializer());
            c.type = std::move(type);
            return make(start, std::move(c));
        }
        std::vector<Expr> args = parse_arguments();
        if (at(TokenKind::LBrace)) {
            std::size_t body = pos_;
            skip_balanced();
            warn(span_from(body), fmt::format("anonymous class body of '{}' not analyzed", type.qualified_name));
            return make(start, Opaque{});
        }
        return make(start, New{std::move(type), std::move(args)});
    }

    Expr parse_postfix(Expr e) {
        std::size_t start = pos_;
        Span origin = e.span;
        auto wrap = [&](auto node) {
            Span s = join(origin, toks_[pos_ - 1].span);
            return Expr{s, std::move(node)};
        };
        (void)start;
        for (;;) {
            if (at(TokenKind::Dot)) {
                ++pos_;
                if (at(TokenKind::Lt)) skip_angles();
                if (at_kw("new")) {
                    // qualified inner class creation
                    Expr inner = parse_new();
                    e = wrap(Compound{"outer.new", {}, std::nullopt});
                    std::get<Compound>(e.node).operands.push_back(std::move(inner));
                    continue;
                }
                if (accept_kw("this")) {
                    e = wrap(This{});
                    continue;
                }
                if (accept_kw("class")) {
                    e = wrap(Compound{"class", {}, std::nullopt});
                    continue;
                }
                if (at_kw("super")) {
                    ++pos_;
                    e = wrap(NameRef{"super"});
                    continue;
                }
                std::string name = expect_ident("member name");
                if (at(TokenKind::LParen)) {
                    std::vector<Expr> args = parse_arguments();
                    e = wrap(Call{box(std::move(e)), std::move(name), std::move(args)});
                } else {
                    e = wrap(FieldAccess{box(std::move(e)), std::move(name)});
                }
            } else if (at(TokenKind::LBracket)) {
                ++pos_;
                Compound c{"[]", {}, std::nullopt};
                c.operands.push_back(std::move(e));
                c.operands.push_back(parse_expr());
                expect(TokenKind::RBracket, "']'");
                e = wrap(std::move(c));
            } else if (at(TokenKind::PlusPlus) || at(TokenKind::MinusMinus)) {
                Compound c{std::string(take().text) + "post", {}, std::nullopt};
                c.operands.push_back(std::move(e));
                e = wrap(std::move(c));
            } else if (at(TokenKind::ColonColon)) {
                ++pos_;
                if (!accept_kw("new")) expect_ident("method name");
                Compound c{"::", {}, std::nullopt};
                c.operands.push_back(std::move(e));
                e = wrap(std::move(c));
            } else {
                return e;
            }
        }
    }

    std::string_view text_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Span end_span_;
    std::vector<Diagnostic> diags_;
    bool in_case_label_ = false;
};

} // namespace

SourceUnit parse_unit(std::string_view text, std::string path) {
    TokenStream stream;
    try {
        stream = tokenize(text);
    } catch (const LexError& err) {
        throw ParseError({Diagnostic{err.span(), err.what()}});
    }
    return Parser(text, std::move(stream)).run(std::move(path));
}

} // namespace cdd::syntax
