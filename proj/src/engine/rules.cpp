#include "cdd/engine/rules.hpp"

#include "cdd/glob.hpp"
#include "cdd/syntax/parser.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <regex>

namespace cdd::engine {

using nlohmann::json;

std::string_view to_string(Category category) {
    switch (category) {
    case Category::Branch: return "branch";
    case Category::Condition: return "condition";
    case Category::Exception: return "exception";
    case Category::InternalCoupling: return "internal_coupling";
    case Category::ExternalCoupling: return "external_coupling";
    }
    return "?";
}

std::optional<Category> category_from_string(std::string_view name) {
    for (Category c : kAllCategories)
        if (to_string(c) == name) return c;
    return std::nullopt;
}

ConfigError::ConfigError(std::string field_path, const std::string& message)
    : std::runtime_error(field_path.empty() ? message : fmt::format("{}: {}", field_path, message)),
      field_path_(std::move(field_path)) {}

Points RuleSet::limit_for(std::string_view path, const std::vector<std::string>& type_names) const {
    for (const auto& o : limit_overrides) {
        if (glob_match(o.glob, path, '/')) return o.limit;
        for (const auto& name : type_names)
            if (glob_match(o.glob, name, '.')) return o.limit;
    }
    return default_limit;
}

bool RuleSet::is_test_path(std::string_view path) const {
    for (const auto& g : test_globs)
        if (glob_match(g, path, '/')) return true;
    return false;
}

bool RuleSet::is_included_path(std::string_view path) const {
    for (const auto& g : exclude_globs)
        if (glob_match(g, path, '/')) return false;
    for (const auto& g : include_globs)
        if (glob_match(g, path, '/')) return true;
    return false;
}

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || a == key;
        if (!known) throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
}

const json& require_object(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError(path, "expected an object");
    return v;
}

Points parse_points(const json& v, const std::string& path, bool allow_zero) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    auto p = Points::from_double(v.get<double>());
    if (!p) throw ConfigError(path, "value must be a multiple of 0.5");
    if (*p < Points{}) throw ConfigError(path, "value must not be negative");
    if (!allow_zero && *p == Points{}) throw ConfigError(path, "value must be greater than 0");
    return *p;
}

std::vector<std::string> parse_globs(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of glob strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::string p = fmt::format("{}[{}]", path, i);
        if (!v[i].is_string()) throw ConfigError(p, "expected a string");
        auto g = v[i].get<std::string>();
        if (!glob_valid(g)) throw ConfigError(p, fmt::format("malformed glob '{}'", g));
        out.push_back(std::move(g));
    }
    return out;
}

} // namespace

RuleSet load_rules(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("", fmt::format("invalid JSON: {}", e.what()));
    }
    require_object(doc, "<root>");
    check_keys(doc, "",
               {"schema_version", "categories", "internal_types", "external_types", "default_limit",
                "limit_overrides", "include_globs", "exclude_globs", "test_globs", "count_lambdas",
                "commit_pattern"});

    RuleSet rules;
    if (doc.contains("schema_version")) {
        const auto& v = doc["schema_version"];
        if (!v.is_number_integer() || v.get<int>() != kConfigSchemaVersion)
            throw ConfigError("schema_version", fmt::format("unsupported version (expected {})", kConfigSchemaVersion));
    }
    if (doc.contains("categories")) {
        const auto& cats = require_object(doc["categories"], "categories");
        for (const auto& [name, body] : cats.items()) {
            std::string path = "categories." + name;
            auto cat = category_from_string(name);
            if (!cat) throw ConfigError(path, "unknown category");
            require_object(body, path);
            check_keys(body, path, {"enabled", "cost"});
            auto& rule = rules.rule(*cat);
            if (body.contains("enabled")) {
                if (!body["enabled"].is_boolean()) throw ConfigError(path + ".enabled", "expected a boolean");
                rule.enabled = body["enabled"].get<bool>();
            }
            if (body.contains("cost")) rule.cost = parse_points(body["cost"], path + ".cost", true);
        }
    }
    if (doc.contains("internal_types")) rules.internal_types = parse_globs(doc["internal_types"], "internal_types");
    if (doc.contains("external_types")) rules.external_types = parse_globs(doc["external_types"], "external_types");
    if (doc.contains("default_limit")) rules.default_limit = parse_points(doc["default_limit"], "default_limit", false);
    if (doc.contains("limit_overrides")) {
        const auto& arr = doc["limit_overrides"];
        if (!arr.is_array()) throw ConfigError("limit_overrides", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string path = fmt::format("limit_overrides[{}]", i);
            require_object(arr[i], path);
            check_keys(arr[i], path, {"glob", "limit"});
            if (!arr[i].contains("glob") || !arr[i]["glob"].is_string())
                throw ConfigError(path + ".glob", "expected a string");
            if (!arr[i].contains("limit")) throw ConfigError(path + ".limit", "missing");
            LimitOverride o{arr[i]["glob"].get<std::string>(), parse_points(arr[i]["limit"], path + ".limit", false)};
            if (!glob_valid(o.glob)) throw ConfigError(path + ".glob", fmt::format("malformed glob '{}'", o.glob));
            rules.limit_overrides.push_back(std::move(o));
        }
    }
    if (doc.contains("include_globs")) rules.include_globs = parse_globs(doc["include_globs"], "include_globs");
    if (doc.contains("exclude_globs")) rules.exclude_globs = parse_globs(doc["exclude_globs"], "exclude_globs");
    if (doc.contains("test_globs")) rules.test_globs = parse_globs(doc["test_globs"], "test_globs");
    if (doc.contains("count_lambdas")) {
        if (!doc["count_lambdas"].is_boolean()) throw ConfigError("count_lambdas", "expected a boolean");
        rules.count_lambdas = doc["count_lambdas"].get<bool>();
    }
    if (doc.contains("commit_pattern")) {
        if (!doc["commit_pattern"].is_string()) throw ConfigError("commit_pattern", "expected a string");
        rules.commit_pattern = doc["commit_pattern"].get<std::string>();
        try {
            std::regex re(rules.commit_pattern);
        } catch (const std::regex_error& e) {
            throw ConfigError("commit_pattern", fmt::format("malformed regular expression: {}", e.what()));
        }
    }
    return rules;
}

namespace {

json points_json(Points p) {
    if (p.is_whole()) return p.halves() / 2;
    return p.to_double();
}

} // namespace

std::string rules_to_json(const RuleSet& rules) {
    json doc;
    doc["schema_version"] = kConfigSchemaVersion;
    json cats = json::object();
    for (Category c : kAllCategories)
        cats[std::string(to_string(c))] = {{"enabled", rules.rule(c).enabled}, {"cost", points_json(rules.rule(c).cost)}};
    doc["categories"] = cats;
    doc["internal_types"] = rules.internal_types;
    doc["external_types"] = rules.external_types;
    doc["default_limit"] = points_json(rules.default_limit);
    json overrides = json::array();
    for (const auto& o : rules.limit_overrides) overrides.push_back({{"glob", o.glob}, {"limit", points_json(o.limit)}});
    doc["limit_overrides"] = overrides;
    doc["include_globs"] = rules.include_globs;
    doc["exclude_globs"] = rules.exclude_globs;
    doc["test_globs"] = rules.test_globs;
    doc["count_lambdas"] = rules.count_lambdas;
    doc["commit_pattern"] = rules.commit_pattern;
    return doc.dump();
}

std::string rules_digest(const RuleSet& rules) {
    return fmt::format("{:016x}", syntax::content_hash(rules_to_json(rules)));
}

std::string default_config_document() {
    return R"({
  // CDD configuration. Comments are allowed; unknown keys are rejected.
  "schema_version": 1,

  // Intrinsic complexity point categories and their cost per occurrence.
  // Costs must be multiples of 0.5.
  "categories": {
    // if, else, loops, ternary, switch and each case/default label
    "branch": {"enabled": true, "cost": 1},
    // 1 per guard plus 1 per && or ||
    "condition": {"enabled": true, "cost": 1},
    // try, each catch, finally
    "exception": {"enabled": true, "cost": 1},
    // fields, parameters, return types and statement-level uses of internal_types
    "internal_coupling": {"enabled": true, "cost": 1},
    // explicit variable declarations of external_types
    "external_coupling": {"enabled": true, "cost": 0.5}
  },

  // Qualified-name globs: `*` stays within one segment, `**` spans segments.
  "internal_types": [],
  "external_types": [],

  // A unit whose total exceeds its limit must be refactored.
  "default_limit": 10,
  // Ordered, first match wins. Globs match the file path or the type name,
  // e.g. {"glob": "**/dto/**", "limit": 20}
  "limit_overrides": [],

  "include_globs": ["**/*.java"],
  "exclude_globs": [],
  "test_globs": ["**/src/test/**"],

  // Lambdas are not an ICP by default; their bodies are not counted.
  "count_lambdas": false,

  // Commits made to conform to the limit: cdd(<unit>): <description>
  "commit_pattern": "^cdd\\(([^)]+)\\):\\s*(.+)$"
}
)";
}

} // namespace cdd::engine
