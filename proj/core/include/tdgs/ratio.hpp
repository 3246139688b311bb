#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace tdgs {

/*
 * Non-negative exact rational extended with +infinity.
 *
 * Always stored in lowest terms with a positive denominator. A zero
 * denominator encodes +infinity (numerator normalized to 1), which is how
 * class ratios with an empty denominator class are represented.
 *
 * Comparison is exact (128-bit cross multiplication), so values can be used
 * as ordered keys.
 */
class Ratio {
public:
    constexpr Ratio() = default;

    /// num/den; den == 0 yields infinity when num > 0. 0/0 is rejected.
    Ratio(std::uint64_t num, std::uint64_t den);

    static Ratio infinity() { return Ratio(1, 0); }
    static Ratio integer(std::uint64_t v) { return Ratio(v, 1); }

    /// Parses "3", "0.25", "1/3" or "inf".
    static Ratio parse(std::string_view text);

    std::uint64_t num() const { return num_; }
    std::uint64_t den() const { return den_; }
    bool is_infinite() const { return den_ == 0; }
    bool is_integer() const { return den_ == 1; }

    /// |this - other|. Undefined for infinite operands (throws).
    Ratio distance(const Ratio& other) const;

    Ratio operator*(const Ratio& other) const;

    double to_double() const;

    /// "inf", or shortest round-trip decimal of the value.
    std::string to_decimal() const;

    /// "inf", "n" or "n/d".
    std::string to_fraction() const;

    friend bool operator==(const Ratio&, const Ratio&) = default;
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);

private:
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace tdgs
