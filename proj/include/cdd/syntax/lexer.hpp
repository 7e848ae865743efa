#pragma once

#include "cdd/syntax/span.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdd::syntax {

enum class TokenKind {
    Identifier,
    Keyword,
    Integer,
    Decimal,
    String,
    Char,
    TextBlock,
    // punctuation
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Semicolon, Comma, Dot, Ellipsis, At, ColonColon, Colon, Question, Arrow,
    // operators
    Assign, CompoundAssign,
    EqEq, NotEq, Lt, Gt, LtEq, GtEq,
    AndAnd, OrOr, Not,
    Amp, Pipe, Caret, Tilde, Shl,
    Plus, Minus, Star, Slash, Percent,
    PlusPlus, MinusMinus,
};

std::string_view to_string(TokenKind kind);

enum class TriviaKind { Whitespace, LineComment, BlockComment };

struct Trivia {
    TriviaKind kind;
    Span span;
};

struct Token {
    TokenKind kind;
    Span span;
    std::string_view text;
    /// Whitespace and comments between the previous token and this one.
    std::vector<Trivia> leading;

    bool is(TokenKind k) const { return kind == k; }
    bool is_keyword(std::string_view kw) const { return kind == TokenKind::Keyword && text == kw; }
};

/// Token stream over a source buffer. `text` views in tokens point into the
/// buffer passed to tokenize, which must outlive the result.
struct TokenStream {
    std::vector<Token> tokens;
    std::vector<Trivia> trailing;
};

class LexError : public std::runtime_error {
public:
    enum class Kind { InvalidCharacter, InvalidUtf8, UnterminatedLiteral, UnterminatedComment };
    LexError(Kind kind, Span span, const std::string& what);
    Kind kind() const { return kind_; }
    const Span& span() const { return span_; }

private:
    Kind kind_;
    Span span_;
};

bool is_valid_utf8(std::string_view text);

TokenStream tokenize(std::string_view text);

} // namespace cdd::syntax
