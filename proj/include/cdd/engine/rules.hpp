#pragma once

#include "cdd/points.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdd::engine {

enum class Category { Branch, Condition, Exception, InternalCoupling, ExternalCoupling };

inline constexpr std::array<Category, 5> kAllCategories{
    Category::Branch, Category::Condition, Category::Exception, Category::InternalCoupling,
    Category::ExternalCoupling};

/// Config key spelling: "branch", "internal_coupling", ...
std::string_view to_string(Category category);
std::optional<Category> category_from_string(std::string_view name);
constexpr std::size_t index_of(Category c) { return static_cast<std::size_t>(c); }

struct CategoryRule {
    bool enabled = true;
    Points cost = Points::whole(1);
    bool operator==(const CategoryRule&) const = default;
};

struct LimitOverride {
    /// Matched against the unit path and against its (qualified) type name.
    std::string glob;
    Points limit;
    bool operator==(const LimitOverride&) const = default;
};

struct RuleSet {
    std::array<CategoryRule, 5> categories{
        CategoryRule{}, CategoryRule{}, CategoryRule{}, CategoryRule{},
        CategoryRule{true, Points::from_halves(1)}};
    std::vector<std::string> internal_types;
    std::vector<std::string> external_types;
    Points default_limit = Points::whole(10);
    /// First match wins.
    std::vector<LimitOverride> limit_overrides;
    std::vector<std::string> include_globs{"**/*.java"};
    std::vector<std::string> exclude_globs;
    std::vector<std::string> test_globs{"**/src/test/**"};
    bool count_lambdas = false;
    std::string commit_pattern = R"(^cdd\(([^)]+)\):\s*(.+)$)";

    const CategoryRule& rule(Category c) const { return categories[index_of(c)]; }
    CategoryRule& rule(Category c) { return categories[index_of(c)]; }

    /// Applicable limit for a unit. `type_names` are tried as given (simple and
    /// package-qualified spellings).
    Points limit_for(std::string_view path, const std::vector<std::string>& type_names) const;

    bool is_test_path(std::string_view path) const;
    bool is_included_path(std::string_view path) const;

    bool operator==(const RuleSet&) const = default;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field_path, const std::string& message);
    const std::string& field_path() const { return field_path_; }

private:
    std::string field_path_;
};

inline constexpr int kConfigSchemaVersion = 1;

/// Parses a `cdd.json` document. `//` comments are allowed. Unknown keys,
/// negative costs, non-half values, malformed globs and patterns raise
/// ConfigError naming the offending field.
RuleSet load_rules(std::string_view document);

/// Canonical JSON rendering (no comments), stable across runs.
std::string rules_to_json(const RuleSet& rules);

/// Short hex digest of the canonical rendering.
std::string rules_digest(const RuleSet& rules);

/// Commented config document holding every default; reloads to RuleSet{}.
std::string default_config_document();

} // namespace cdd::engine
