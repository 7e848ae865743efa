#include "cdd/syntax/lexer.hpp"

#include <array>
#include <optional>
#include <fmt/format.h>

namespace cdd::syntax {

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(diagnostics.empty()
                             ? std::string("parse error")
                             : fmt::format("{}: {}", diagnostics.front().span.line_start,
                                           diagnostics.front().message)),
      diagnostics_(std::move(diagnostics)) {}

LexError::LexError(Kind kind, Span span, const std::string& what)
    : std::runtime_error(what), kind_(kind), span_(span) {}

std::string_view to_string(TokenKind kind) {
    switch (kind) {
    case TokenKind::Identifier: return "Ident";
    case TokenKind::Keyword: return "Keyword";
    case TokenKind::Integer: return "Integer";
    case TokenKind::Decimal: return "Decimal";
    case TokenKind::String: return "String";
    case TokenKind::Char: return "Char";
    case TokenKind::TextBlock: return "TextBlock";
    case TokenKind::LParen: return "LParen";
    case TokenKind::RParen: return "RParen";
    case TokenKind::LBrace: return "LBrace";
    case TokenKind::RBrace: return "RBrace";
    case TokenKind::LBracket: return "LBracket";
    case TokenKind::RBracket: return "RBracket";
    case TokenKind::Semicolon: return "Semicolon";
    case TokenKind::Comma: return "Comma";
    case TokenKind::Dot: return "Dot";
    case TokenKind::Ellipsis: return "Ellipsis";
    case TokenKind::At: return "At";
    case TokenKind::ColonColon: return "ColonColon";
    case TokenKind::Colon: return "Colon";
    case TokenKind::Question: return "Question";
    case TokenKind::Arrow: return "Arrow";
    case TokenKind::Assign: return "Assign";
    case TokenKind::CompoundAssign: return "CompoundAssign";
    case TokenKind::EqEq: return "EqEq";
    case TokenKind::NotEq: return "NotEq";
    case TokenKind::Lt: return "Lt";
    case TokenKind::Gt: return "Gt";
    case TokenKind::LtEq: return "LtEq";
    case TokenKind::GtEq: return "GtEq";
    case TokenKind::AndAnd: return "AndAnd";
    case TokenKind::OrOr: return "OrOr";
    case TokenKind::Not: return "Not";
    case TokenKind::Amp: return "Amp";
    case TokenKind::Pipe: return "Pipe";
    case TokenKind::Caret: return "Caret";
    case TokenKind::Tilde: return "Tilde";
    case TokenKind::Shl: return "Shl";
    case TokenKind::Plus: return "Plus";
    case TokenKind::Minus: return "Minus";
    case TokenKind::Star: return "Star";
    case TokenKind::Slash: return "Slash";
    case TokenKind::Percent: return "Percent";
    case TokenKind::PlusPlus: return "PlusPlus";
    case TokenKind::MinusMinus: return "MinusMinus";
    }
    return "?";
}

bool is_valid_utf8(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        auto c = static_cast<unsigned char>(text[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) { ++i; continue; }
        if ((c & 0xE0) == 0xC0) { extra = 1; cp = c & 0x1F; }
        else if ((c & 0xF0) == 0xE0) { extra = 2; cp = c & 0x0F; }
        else if ((c & 0xF8) == 0xF0) { extra = 3; cp = c & 0x07; }
        else return false;
        if (i + extra >= text.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            auto cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        static constexpr std::array<std::uint32_t, 4> min_cp{0, 0x80, 0x800, 0x10000};
        if (cp < min_cp[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += extra + 1;
    }
    return true;
}

namespace {

constexpr std::array<std::string_view, 51> kKeywords{
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
    "class", "const", "continue", "default", "do", "double", "else", "enum",
    "extends", "final", "finally", "float", "for", "goto", "if", "implements",
    "import", "instanceof", "int", "interface", "long", "native", "new",
    "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "void", "volatile", "while", "_"};

bool is_keyword(std::string_view word) {
    for (auto kw : kKeywords)
        if (kw == word) return true;
    // Literal words behave like keywords for the parser.
    return word == "true" || word == "false" || word == "null";
}

bool ident_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}
bool ident_part(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool hex_digit(unsigned char c) {
    return digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    TokenStream run() {
        TokenStream out;
        std::vector<Trivia> pending;
        while (pos_ < text_.size()) {
            if (auto trivia = lex_trivia()) {
                pending.push_back(*trivia);
                continue;
            }
            Token tok = lex_token();
            tok.leading = std::move(pending);
            pending.clear();
            out.tokens.push_back(std::move(tok));
        }
        out.trailing = std::move(pending);
        return out;
    }

private:
    unsigned char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? static_cast<unsigned char>(text_[pos_ + ahead]) : 0;
    }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    // Span of [start, pos_) given the line at start. A trailing newline is
    // attributed to the line it terminates.
    Span span_from(std::size_t start, std::uint32_t start_line) const {
        std::uint32_t end_line = line_;
        if (pos_ > start && text_[pos_ - 1] == '\n') --end_line;
        if (end_line < start_line) end_line = start_line;
        return {static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(pos_), start_line, end_line};
    }

    std::optional<Trivia> lex_trivia() {
        std::size_t start = pos_;
        std::uint32_t start_line = line_;
        unsigned char c = peek();
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
            while (pos_ < text_.size()) {
                unsigned char w = peek();
                if (w != ' ' && w != '\t' && w != '\n' && w != '\r' && w != '\f') break;
                advance();
            }
            return Trivia{TriviaKind::Whitespace, span_from(start, start_line)};
        }
        if (c == '/' && peek(1) == '/') {
            while (pos_ < text_.size() && peek() != '\n') advance();
            return Trivia{TriviaKind::LineComment, span_from(start, start_line)};
        }
        if (c == '/' && peek(1) == '*') {
            advance(2);
            while (pos_ < text_.size() && !(peek() == '*' && peek(1) == '/')) advance();
            if (pos_ >= text_.size())
                throw LexError(LexError::Kind::UnterminatedComment, span_from(start, start_line),
                               fmt::format("{}: unterminated block comment", start_line));
            advance(2);
            return Trivia{TriviaKind::BlockComment, span_from(start, start_line)};
        }
        return std::nullopt;
    }

    Token make(TokenKind kind, std::size_t start, std::uint32_t start_line) const {
        return Token{kind, span_from(start, start_line), text_.substr(start, pos_ - start), {}};
    }

    Token lex_token() {
        std::size_t start = pos_;
        std::uint32_t start_line = line_;
        unsigned char c = peek();

        if (ident_start(c)) {
            while (ident_part(peek())) advance();
            auto word = text_.substr(start, pos_ - start);
            return make(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, start, start_line);
        }
        if (digit(c) || (c == '.' && digit(peek(1)))) return lex_number(start, start_line);
        if (c == '"') {
            if (peek(1) == '"' && peek(2) == '"') return lex_text_block(start, start_line);
            return lex_quoted('"', TokenKind::String, start, start_line);
        }
        if (c == '\'') return lex_quoted('\'', TokenKind::Char, start, start_line);

        auto op = [&](std::size_t len, TokenKind kind) {
            advance(len);
            return make(kind, start, start_line);
        };
        unsigned char n1 = peek(1);
        unsigned char n2 = peek(2);
        switch (c) {
        case '(': return op(1, TokenKind::LParen);
        case ')': return op(1, TokenKind::RParen);
        case '{': return op(1, TokenKind::LBrace);
        case '}': return op(1, TokenKind::RBrace);
        case '[': return op(1, TokenKind::LBracket);
        case ']': return op(1, TokenKind::RBracket);
        case ';': return op(1, TokenKind::Semicolon);
        case ',': return op(1, TokenKind::Comma);
        case '@': return op(1, TokenKind::At);
        case '?': return op(1, TokenKind::Question);
        case '~': return op(1, TokenKind::Tilde);
        case '.':
            if (n1 == '.' && n2 == '.') return op(3, TokenKind::Ellipsis);
            return op(1, TokenKind::Dot);
        case ':':
            if (n1 == ':') return op(2, TokenKind::ColonColon);
            return op(1, TokenKind::Colon);
        case '=':
            if (n1 == '=') return op(2, TokenKind::EqEq);
            return op(1, TokenKind::Assign);
        case '!':
            if (n1 == '=') return op(2, TokenKind::NotEq);
            return op(1, TokenKind::Not);
        case '<':
            if (n1 == '<' && n2 == '=') return op(3, TokenKind::CompoundAssign);
            if (n1 == '<') return op(2, TokenKind::Shl);
            if (n1 == '=') return op(2, TokenKind::LtEq);
            return op(1, TokenKind::Lt);
        case '>':
            // `>>` and `>>>` stay split so generic closers parse; the parser
            // rejoins adjacent `>` tokens into shifts.
            if (n1 == '=') return op(2, TokenKind::GtEq);
            return op(1, TokenKind::Gt);
        case '&':
            if (n1 == '&') return op(2, TokenKind::AndAnd);
            if (n1 == '=') return op(2, TokenKind::CompoundAssign);
            return op(1, TokenKind::Amp);
        case '|':
            if (n1 == '|') return op(2, TokenKind::OrOr);
            if (n1 == '=') return op(2, TokenKind::CompoundAssign);
            return op(1, TokenKind::Pipe);
        case '^':
            if (n1 == '=') return op(2, TokenKind::CompoundAssign);
            return op(1, TokenKind::Caret);
        case '+':
            if (n1 == '+') return op(2, TokenKind::PlusPlus);
            if (n1 == '=') return op(2, TokenKind::CompoundAssign);
            return op(1, TokenKind::Plus);
        case '-':
            if (n1 == '-') return op(2, TokenKind::MinusMinus);
            if (n1 == '=') return op(2, TokenKind::CompoundAssign);
            if (n1 == '>') return op(2, TokenKind::Arrow);
            return op(1, TokenKind::Minus);
        case '*':
            if (n1 == '=') return op(2, TokenKind::CompoundAssign);
            return op(1, TokenKind::Star);
        case '/':
            if (n1 == '=') return op(2, TokenKind::CompoundAssign);
            return op(1, TokenKind::Slash);
        case '%':
            if (n1 == '=') return op(2, TokenKind::CompoundAssign);
            return op(1, TokenKind::Percent);
        default:
            break;
        }
        advance();
        throw LexError(LexError::Kind::InvalidCharacter, span_from(start, start_line),
                       fmt::format("{}: invalid character 0x{:02x}", start_line, c));
    }

    Token lex_number(std::size_t start, std::uint32_t start_line) {
        bool is_decimal = false;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
            advance(2);
            while (hex_digit(peek()) || peek() == '_') advance();
        } else if (peek() == '0' && (peek(1) == 'b' || peek(1) == 'B')) {
            advance(2);
            while (peek() == '0' || peek() == '1' || peek() == '_') advance();
        } else {
            while (digit(peek()) || peek() == '_') advance();
            if (peek() == '.' && digit(peek(1))) {
                is_decimal = true;
                advance();
                while (digit(peek()) || peek() == '_') advance();
            } else if (peek() == '.' && !ident_start(peek(1)) && peek(1) != '.') {
                // `1.` is a valid floating literal
                is_decimal = true;
                advance();
            }
            if (peek() == 'e' || peek() == 'E') {
                std::size_t k = 1;
                if (peek(1) == '+' || peek(1) == '-') ++k;
                if (digit(peek(k))) {
                    is_decimal = true;
                    advance(k);
                    while (digit(peek())) advance();
                }
            }
            if (peek() == 'f' || peek() == 'F' || peek() == 'd' || peek() == 'D') {
                is_decimal = true;
                advance();
            }
        }
        if (peek() == 'l' || peek() == 'L') advance();
        if (ident_part(peek()))
            throw LexError(LexError::Kind::InvalidCharacter, span_from(start, start_line),
                           fmt::format("{}: malformed numeric literal", start_line));
        return make(is_decimal ? TokenKind::Decimal : TokenKind::Integer, start, start_line);
    }

    Token lex_quoted(char quote, TokenKind kind, std::size_t start, std::uint32_t start_line) {
        advance();
        while (pos_ < text_.size() && peek() != static_cast<unsigned char>(quote)) {
            if (peek() == '\n') break;
            if (peek() == '\\') advance();
            advance();
        }
        if (peek() != static_cast<unsigned char>(quote))
            throw LexError(LexError::Kind::UnterminatedLiteral, span_from(start, start_line),
                           fmt::format("{}: unterminated literal", start_line));
        advance();
        return make(kind, start, start_line);
    }

    Token lex_text_block(std::size_t start, std::uint32_t start_line) {
        advance(3);
        while (pos_ < text_.size() && !(peek() == '"' && peek(1) == '"' && peek(2) == '"')) {
            if (peek() == '\\') advance();
            advance();
        }
        if (pos_ >= text_.size())
            throw LexError(LexError::Kind::UnterminatedLiteral, span_from(start, start_line),
                           fmt::format("{}: unterminated text block", start_line));
        advance(3);
        return make(TokenKind::TextBlock, start, start_line);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1;
};

} // namespace

TokenStream tokenize(std::string_view text) {
    if (!is_valid_utf8(text)) {
        std::uint32_t len = static_cast<std::uint32_t>(text.size());
        throw LexError(LexError::Kind::InvalidUtf8, Span{0, len, 1, 1}, "input is not valid UTF-8");
    }
    return Lexer(text).run();
}

} // namespace cdd::syntax
