#pragma once

#include <string>
#include <string_view>

namespace cdd {

/// Glob matching with `*` (one segment), `**` (any depth), `?` (one char).
/// `sep` is '/' for paths and '.' for qualified type names. A leading `**/`
/// also matches zero segments.
bool glob_match(std::string_view pattern, std::string_view text, char sep = '/');

/// Rejects patterns with empty `**` misuse such as `***`.
bool glob_valid(std::string_view pattern);

} // namespace cdd
