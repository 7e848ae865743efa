#pragma once

#include "cdd/engine/rules.hpp"
#include "cdd/syntax/ast.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cdd::engine {

inline constexpr std::uint32_t kShortMethodLines = 24;

/// Distribution of method body lengths (brace line to brace line) after
/// dropping test code, equals/hashCode, trivial accessors and bodiless methods.
struct MethodStats {
    std::size_t counted_methods = 0;
    std::size_t excluded_methods = 0;
    // Absent when nothing was counted.
    std::optional<std::uint32_t> min;
    std::optional<double> mean;
    std::optional<double> median;
    std::optional<std::uint32_t> max;
    /// Population standard deviation.
    std::optional<double> stddev;
    std::optional<double> percent_at_or_under_24;
    std::vector<std::uint32_t> lengths;
};

enum class MethodExclusion { None, TestCode, EqualsOrHashCode, Accessor, NoBody };

/// Why a method would be dropped from the statistics.
MethodExclusion classify_method(const syntax::MethodDecl& method, bool in_test_file);

/// Accessor heuristic: get*/set*/is* name and a body that is a single return
/// or a single assignment.
bool is_trivial_accessor(const syntax::MethodDecl& method);

MethodStats summarize_lengths(std::vector<std::uint32_t> lengths, std::size_t excluded);

MethodStats method_stats(std::span<const syntax::SourceUnit> units, const RuleSet& rules);

} // namespace cdd::engine
