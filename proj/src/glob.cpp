#include "cdd/glob.hpp"

namespace cdd {
namespace {

bool match_at(std::string_view p, std::string_view t, char sep) {
    while (!p.empty()) {
        if (p.starts_with("**")) {
            std::string_view rest = p.substr(2);
            // `**<sep>` may swallow zero segments.
            if (!rest.empty() && rest.front() == sep) {
                if (match_at(rest.substr(1), t, sep)) return true;
            }
            for (std::size_t i = 0; i <= t.size(); ++i)
                if (match_at(rest, t.substr(i), sep)) return true;
            return false;
        }
        if (p.front() == '*') {
            std::string_view rest = p.substr(1);
            for (std::size_t i = 0; i <= t.size(); ++i) {
                if (match_at(rest, t.substr(i), sep)) return true;
                if (i < t.size() && t[i] == sep) break;
            }
            return false;
        }
        if (t.empty()) return false;
        if (p.front() == '?') {
            if (t.front() == sep) return false;
        } else if (p.front() != t.front()) {
            return false;
        }
        p.remove_prefix(1);
        t.remove_prefix(1);
    }
    return t.empty();
}

} // namespace

bool glob_match(std::string_view pattern, std::string_view text, char sep) {
    return match_at(pattern, text, sep);
}

bool glob_valid(std::string_view pattern) {
    return !pattern.empty() && pattern.find("***") == std::string_view::npos;
}

} // namespace cdd
