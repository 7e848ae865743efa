#include "cdd/syntax/lexer.hpp"
#include "cdd/syntax/parser.hpp"

#include "helpers.hpp"

#include <cstdio>
#include <doctest.h>

using namespace cdd::syntax;

TEST_CASE("lexer: empty input yields no tokens") {
    auto ts = tokenize("");
    CHECK(ts.tokens.empty());
    CHECK(ts.trailing.empty());
}

TEST_CASE("lexer: annotation with a decimal argument") {
    auto ts = tokenize("@ICP(0.5)");
    REQUIRE(ts.tokens.size() == 5);
    CHECK(ts.tokens[0].kind == TokenKind::At);
    CHECK(ts.tokens[1].kind == TokenKind::Identifier);
    CHECK(ts.tokens[1].text == "ICP");
    CHECK(ts.tokens[2].kind == TokenKind::LParen);
    CHECK(ts.tokens[3].kind == TokenKind::Decimal);
    CHECK(ts.tokens[3].text == "0.5");
    CHECK(ts.tokens[4].kind == TokenKind::RParen);
}

TEST_CASE("lexer: guard with two comparisons has ten tokens") {
    auto ts = tokenize("if (a > b && c < d)");
    REQUIRE(ts.tokens.size() == 10);
    CHECK(ts.tokens[0].is_keyword("if"));
    CHECK(ts.tokens[3].kind == TokenKind::Gt);
    CHECK(ts.tokens[5].kind == TokenKind::AndAnd);
    CHECK(ts.tokens[7].kind == TokenKind::Lt);
}

TEST_CASE("lexer: comments and whitespace become leading trivia") {
    auto ts = tokenize("// hi\n/* block */ x");
    REQUIRE(ts.tokens.size() == 1);
    const auto& lead = ts.tokens[0].leading;
    REQUIRE(lead.size() == 4);
    CHECK(lead[0].kind == TriviaKind::LineComment);
    CHECK(lead[2].kind == TriviaKind::BlockComment);
    CHECK(ts.tokens[0].span.line_start == 2);
}

TEST_CASE("lexer: literals") {
    auto ts = tokenize(R"(0x1F 1_000L 3.5e2f 'a' '\'' "s\"q" """
text "" block
""" )");
    REQUIRE(ts.tokens.size() == 7);
    CHECK(ts.tokens[0].kind == TokenKind::Integer);
    CHECK(ts.tokens[1].kind == TokenKind::Integer);
    CHECK(ts.tokens[2].kind == TokenKind::Decimal);
    CHECK(ts.tokens[3].kind == TokenKind::Char);
    CHECK(ts.tokens[4].kind == TokenKind::Char);
    CHECK(ts.tokens[5].kind == TokenKind::String);
    CHECK(ts.tokens[6].kind == TokenKind::TextBlock);
    CHECK(ts.tokens[6].span.line_end == 3);
}

TEST_CASE("lexer: errors") {
    CHECK_THROWS_AS(tokenize("\"open"), LexError);
    CHECK_THROWS_AS(tokenize("/* open"), LexError);
    CHECK_THROWS_AS(tokenize("a # b"), LexError);
    CHECK_THROWS_AS(tokenize(std::string("a \xff b")), LexError);
    CHECK_FALSE(is_valid_utf8("\xc3"));
    CHECK(is_valid_utf8("caf\xc3\xa9"));
}

TEST_CASE("physical_loc counts newline bytes") {
    CHECK(physical_loc("a\nb\n") == 2);
    CHECK(physical_loc("") == 0);
    CHECK(physical_loc("a\nb") == 1);
    CHECK(physical_loc("a\r\nb\r\n") == 2);
}

TEST_CASE("physical_loc agrees with wc -l on every fixture file") {
    namespace fs = std::filesystem;
    std::size_t checked = 0;
    for (const auto& e : fs::recursive_directory_iterator(testing::fixtures())) {
        if (!e.is_regular_file() || e.path().extension() != ".java") continue;
        std::string cmd = "wc -l < '" + e.path().string() + "'";
        FILE* p = popen(cmd.c_str(), "r");
        REQUIRE(p);
        unsigned long wc = 0;
        REQUIRE(std::fscanf(p, "%lu", &wc) == 1);
        pclose(p);
        CAPTURE(e.path().string());
        CHECK(physical_loc(testing::read_file(e.path())) == wc);
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("parse: minimal class") {
    auto u = parse_unit("class A {}", "A.java");
    REQUIRE(u.types.size() == 1);
    CHECK(u.types[0].name == "A");
    CHECK(u.types[0].fields.empty());
    CHECK(u.types[0].methods.empty());
    CHECK(u.diagnostics.empty());
}

TEST_CASE("parse: annotated controller") {
    auto text = testing::read_file(testing::fixtures() / "oracle/CertificateDetailsController.java");
    auto u = parse_unit(text, "CertificateDetailsController.java");
    REQUIRE(u.types.size() == 1);
    const auto& t = u.types[0];
    CHECK(t.fields.size() == 2);
    REQUIRE(t.methods.size() == 1);
    const auto& body = std::get<Block>(t.methods[0].body->node);
    int locals = 0, ifs = 0, returns = 0;
    for (const auto& s : body.stmts) {
        locals += std::holds_alternative<LocalDecl>(s.node);
        ifs += std::holds_alternative<If>(s.node);
        returns += std::holds_alternative<Return>(s.node);
    }
    // The listing declares three `var` locals.
    CHECK(locals == 3);
    CHECK(ifs == 1);
    CHECK(returns == 1);
    CHECK(u.diagnostics.empty());
    // `@ICP(2)` in front of the `if` is kept as a statement marker.
    const Stmt* the_if = nullptr;
    for (const auto& s : body.stmts)
        if (std::holds_alternative<If>(s.node)) the_if = &s;
    REQUIRE(the_if);
    REQUIRE(the_if->markers.size() == 1);
    CHECK(the_if->markers[0].numeric_arg->to_halves() == 4);
}

TEST_CASE("parse: anonymous class body is opaque with one diagnostic") {
    auto u = parse_unit("class A { void m() { Runnable r = new Runnable() { public void run() { if (x) {} } }; } }",
                        "A.java");
    CHECK(u.diagnostics.size() == 1);
    CHECK(dump(u).find("opaque") != std::string::npos);
}

TEST_CASE("parse: comment-form markers") {
    auto u = parse_unit("class A {\n void m() {\n  // @ICP(2)\n  if (x) {}\n }\n}\n", "A.java");
    const auto& body = std::get<Block>(u.types[0].methods[0].body->node);
    REQUIRE(body.stmts.size() == 1);
    REQUIRE(body.stmts[0].markers.size() == 1);
    CHECK(body.stmts[0].markers[0].from_comment);
}

TEST_CASE("parse: var locals carry no type, multi-catch keeps both types") {
    auto u = parse_unit("class A { void m() { var x = f(); try { } catch (A | B e) { } } }", "A.java");
    const auto& body = std::get<Block>(u.types[0].methods[0].body->node);
    REQUIRE(body.stmts.size() == 2);
    CHECK_FALSE(std::get<LocalDecl>(body.stmts[0].node).declared_type);
    const auto& t = std::get<Try>(body.stmts[1].node);
    REQUIRE(t.catches.size() == 1);
    CHECK(t.catches[0].types.size() == 2);
}

TEST_CASE("parse: generics, shifts and casts") {
    auto u = parse_unit(R"(package p.q;
import java.util.*;
import java.util.Map;
public final class G<T extends Comparable<T>> implements Iterable<T> {
  private Map<String, List<Integer>> m = new HashMap<>();
  int s(int a) { int b = a >> 2; b >>>= 1; return (int) (a << b); }
  <R> R id(R r) { return r; }
  java.util.List<? super T> w;
})",
                        "G.java");
    CHECK(u.diagnostics.empty());
    REQUIRE(u.package);
    CHECK(*u.package == "p.q");
    CHECK(u.imports.size() == 2);
    const auto& t = u.types.at(0);
    CHECK(t.fields.size() == 2);
    CHECK(t.fields[0].declared_type.type_args.size() == 2);
    CHECK(t.methods.size() == 2);
}

TEST_CASE("parse: enums, interfaces and nested types") {
    auto u = parse_unit(R"(enum Color { RED, GREEN("g"); Color() {} Color(String s) {} }
interface Shape { double area(); default int sides() { return 0; } }
class Outer { static class Inner { } interface Nested { } })",
                        "Mixed.java");
    REQUIRE(u.types.size() == 3);
    CHECK(u.types[0].kind == TypeKind::Enum);
    CHECK(u.types[0].enum_constants.size() == 2);
    CHECK(u.types[1].kind == TypeKind::Interface);
    CHECK_FALSE(u.types[1].methods[0].body);
    CHECK(u.types[2].nested.size() == 2);
}

TEST_CASE("parse: unparseable statement degrades, bad header throws") {
    auto u = parse_unit("class A { void m() { int x = ; foo(); } int ok; }", "A.java");
    CHECK(u.diagnostics.size() >= 1);
    CHECK(u.types[0].fields.size() == 1);
    CHECK_THROWS_AS(parse_unit("class { }", "A.java"), ParseError);
    CHECK_THROWS_AS(parse_unit("class A { void m() { ", "A.java"), ParseError);
    CHECK_THROWS_AS(parse_unit("\"unterminated", "A.java"), ParseError);
}

TEST_CASE("parse is deterministic") {
    auto text = testing::read_file(testing::fixtures() / "oracle/Batch.java");
    CHECK(dump(parse_unit(text, "B.java")) == dump(parse_unit(text, "B.java")));
}
