#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdd::syntax {

/// Byte range [byte_start, byte_end) plus the 1-based lines it touches.
struct Span {
    std::uint32_t byte_start = 0;
    std::uint32_t byte_end = 0;
    std::uint32_t line_start = 1;
    std::uint32_t line_end = 1;

    bool contains(const Span& inner) const {
        return byte_start <= inner.byte_start && inner.byte_end <= byte_end;
    }
    std::uint32_t line_count() const { return line_end - line_start + 1; }
    bool operator==(const Span&) const = default;
};

inline Span join(const Span& a, const Span& b) {
    return {a.byte_start, b.byte_end, a.line_start, b.line_end};
}

struct Diagnostic {
    Span span;
    std::string message;
};

/// Raised when the class or member structure of a file cannot be recovered.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

} // namespace cdd::syntax
