#include "cdd/points.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace cdd {

std::optional<Decimal> Decimal::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
    if (whole.size() + frac.size() > 17) return std::nullopt;

    std::int64_t units = 0;
    for (std::string_view part : {whole, frac}) {
        for (char c : part) {
            if (c < '0' || c > '9') return std::nullopt;
            units = units * 10 + (c - '0');
        }
    }
    return Decimal{negative ? -units : units, static_cast<int>(frac.size())};
}

std::optional<std::int64_t> Decimal::to_halves() const {
    std::int64_t denom = 1;
    for (int i = 0; i < scale; ++i) denom *= 10;
    std::int64_t doubled = units * 2;
    if (doubled % denom != 0) return std::nullopt;
    return doubled / denom;
}

std::string Decimal::to_string() const {
    std::string digits = std::to_string(units < 0 ? -units : units);
    if (scale > 0) {
        if (static_cast<int>(digits.size()) <= scale)
            digits.insert(0, static_cast<std::size_t>(scale) + 1 - digits.size(), '0');
        digits.insert(digits.size() - static_cast<std::size_t>(scale), ".");
    }
    return units < 0 ? "-" + digits : digits;
}

std::optional<Points> Points::from_double(double value) {
    double doubled = value * 2.0;
    if (!std::isfinite(doubled) || std::fabs(doubled) > 1e15) return std::nullopt;
    if (std::nearbyint(doubled) != doubled) return std::nullopt;
    return Points(static_cast<std::int64_t>(doubled));
}

std::optional<Points> Points::parse(std::string_view text) {
    auto dec = Decimal::parse(text);
    if (!dec) return std::nullopt;
    auto halves = dec->to_halves();
    if (!halves) return std::nullopt;
    return Points(*halves);
}

std::string Points::to_string() const {
    std::int64_t magnitude = halves_ < 0 ? -halves_ : halves_;
    std::string out = halves_ < 0 ? "-" : "";
    out += std::to_string(magnitude / 2);
    if (magnitude % 2 != 0) out += ".5";
    return out;
}

} // namespace cdd
