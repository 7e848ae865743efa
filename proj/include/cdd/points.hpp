#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cdd {

/// Exact decimal as written in source or config: value = units / 10^scale.
struct Decimal {
    std::int64_t units = 0;
    int scale = 0;

    static std::optional<Decimal> parse(std::string_view text);
    /// Returns the value as a count of half points when it is an exact multiple of 0.5.
    std::optional<std::int64_t> to_halves() const;
    std::string to_string() const;
    bool operator==(const Decimal&) const = default;
};

/// An ICP score held as an integer number of half points.
class Points {
public:
    constexpr Points() = default;

    static constexpr Points from_halves(std::int64_t halves) { return Points(halves); }
    static constexpr Points whole(std::int64_t n) { return Points(n * 2); }
    /// Accepts only values that are exact multiples of 0.5.
    static std::optional<Points> from_double(double value);
    static std::optional<Points> parse(std::string_view text);

    constexpr std::int64_t halves() const { return halves_; }
    constexpr double to_double() const { return static_cast<double>(halves_) / 2.0; }
    constexpr bool is_whole() const { return halves_ % 2 == 0; }

    /// "8", "7.5", "-1", "0.5".
    std::string to_string() const;

    constexpr Points& operator+=(Points other) { halves_ += other.halves_; return *this; }
    constexpr Points& operator-=(Points other) { halves_ -= other.halves_; return *this; }
    friend constexpr Points operator+(Points a, Points b) { return a += b; }
    friend constexpr Points operator-(Points a, Points b) { return a -= b; }
    friend constexpr Points operator*(Points a, std::int64_t k) { return Points(a.halves_ * k); }
    friend constexpr auto operator<=>(Points, Points) = default;

private:
    constexpr explicit Points(std::int64_t halves) : halves_(halves) {}
    std::int64_t halves_ = 0;
};

} // namespace cdd
