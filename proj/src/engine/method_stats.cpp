#include "cdd/engine/method_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cdd::engine {

using namespace cdd::syntax;

namespace {

bool has_prefix_word(std::string_view name, std::string_view prefix) {
    if (!name.starts_with(prefix)) return false;
    if (name.size() == prefix.size()) return true;
    char next = name[prefix.size()];
    return (next >= 'A' && next <= 'Z') || next == '_' || (next >= '0' && next <= '9');
}

bool is_single_assignment(const Stmt& s) {
    auto* e = std::get_if<ExprStmt>(&s.node);
    if (!e) return false;
    auto* c = std::get_if<Compound>(&e->expr.node);
    return c && c->op == "=";
}

void collect(const TypeDecl& t, bool test_file, std::vector<std::uint32_t>& lengths, std::size_t& excluded) {
    for (const auto& m : t.methods) {
        if (m.is_initializer) continue;
        if (classify_method(m, test_file) == MethodExclusion::None) lengths.push_back(m.body_line_count);
        else ++excluded;
    }
    for (const auto& n : t.nested) collect(n, test_file, lengths, excluded);
}

} // namespace

bool is_trivial_accessor(const MethodDecl& m) {
    if (!has_prefix_word(m.name, "get") && !has_prefix_word(m.name, "set") && !has_prefix_word(m.name, "is"))
        return false;
    if (!m.body) return false;
    auto* block = std::get_if<Block>(&m.body->node);
    if (!block || block->stmts.size() != 1) return false;
    const Stmt& only = block->stmts.front();
    return std::holds_alternative<Return>(only.node) || is_single_assignment(only);
}

MethodExclusion classify_method(const MethodDecl& m, bool in_test_file) {
    if (in_test_file) return MethodExclusion::TestCode;
    for (const auto& a : m.annotations)
        if (a.simple_name() == "Test" || a.simple_name() == "ParameterizedTest") return MethodExclusion::TestCode;
    if (!m.body) return MethodExclusion::NoBody;
    if (!m.is_constructor && (m.name == "equals" || m.name == "hashCode")) return MethodExclusion::EqualsOrHashCode;
    if (is_trivial_accessor(m)) return MethodExclusion::Accessor;
    return MethodExclusion::None;
}

MethodStats summarize_lengths(std::vector<std::uint32_t> lengths, std::size_t excluded) {
    MethodStats s;
    s.counted_methods = lengths.size();
    s.excluded_methods = excluded;
    if (!lengths.empty()) {
        std::vector<std::uint32_t> sorted = lengths;
        std::sort(sorted.begin(), sorted.end());
        double n = static_cast<double>(sorted.size());
        double sum = std::accumulate(sorted.begin(), sorted.end(), 0.0);
        double mean = sum / n;
        double sq = 0.0;
        for (auto v : sorted) sq += (v - mean) * (v - mean);
        std::size_t mid = sorted.size() / 2;
        s.min = sorted.front();
        s.max = sorted.back();
        s.mean = mean;
        s.median = sorted.size() % 2 ? static_cast<double>(sorted[mid]) : (sorted[mid - 1] + sorted[mid]) / 2.0;
        s.stddev = std::sqrt(sq / n);
        auto short_ones = std::count_if(sorted.begin(), sorted.end(), [](auto v) { return v <= kShortMethodLines; });
        s.percent_at_or_under_24 = 100.0 * static_cast<double>(short_ones) / n;
    }
    s.lengths = std::move(lengths);
    return s;
}

MethodStats method_stats(std::span<const SourceUnit> units, const RuleSet& rules) {
    std::vector<std::uint32_t> lengths;
    std::size_t excluded = 0;
    for (const auto& u : units) {
        bool test_file = rules.is_test_path(u.path);
        for (const auto& t : u.types) collect(t, test_file, lengths, excluded);
    }
    return summarize_lengths(std::move(lengths), excluded);
}

} // namespace cdd::engine
