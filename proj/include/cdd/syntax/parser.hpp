#pragma once

#include "cdd/syntax/ast.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace cdd::syntax {

/// Parses one source file. Unsupported statements and expressions degrade to
/// Opaque nodes with a diagnostic; unrecoverable members are skipped with a
/// diagnostic. Throws ParseError when a type header or the file structure
/// itself cannot be parsed (lexical errors included).
SourceUnit parse_unit(std::string_view text, std::string path);

/// Number of newline bytes, as `wc -l` counts them.
std::uint32_t physical_loc(std::string_view text);

std::uint64_t content_hash(std::string_view text);

/// Canonical S-expression rendering of a tree, used to compare parses.
std::string dump(const SourceUnit& unit);

} // namespace cdd::syntax
