#include "tdgs/ratio.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <system_error>

#include "tdgs/error.hpp"

namespace tdgs {

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint64_t parse_u64(std::string_view digits, std::string_view whole) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
        throw ValidationError("invalid rational '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

Ratio::Ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) {
        if (num == 0) throw ValidationError("ratio 0/0 is undefined");
        num_ = 1;
        den_ = 0;
        return;
    }
    const std::uint64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

Ratio Ratio::parse(std::string_view text) {
    if (text == "inf") return infinity();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        return Ratio(parse_u64(text.substr(0, slash), text), parse_u64(text.substr(slash + 1), text));
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) return integer(parse_u64(text, text));
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    if (frac_part.size() > 18 || (int_part.empty() && frac_part.empty())) {
        throw ValidationError("invalid rational '" + std::string(text) + "'");
    }
    std::uint64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    const std::uint64_t whole = int_part.empty() ? 0 : parse_u64(int_part, text);
    const std::uint64_t frac = frac_part.empty() ? 0 : parse_u64(frac_part, text);
    const u128 num = static_cast<u128>(whole) * scale + frac;
    if (num > UINT64_MAX) throw ValidationError("rational out of range '" + std::string(text) + "'");
    return Ratio(static_cast<std::uint64_t>(num), scale);
}

Ratio Ratio::distance(const Ratio& other) const {
    if (is_infinite() || other.is_infinite()) throw ValidationError("distance to an infinite ratio");
    const u128 lhs = static_cast<u128>(num_) * other.den_;
    const u128 rhs = static_cast<u128>(other.num_) * den_;
    const u128 diff = lhs > rhs ? lhs - rhs : rhs - lhs;
    const u128 den = static_cast<u128>(den_) * other.den_;
    // reduce in 128 bits before narrowing
    u128 a = diff, b = den;
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    const u128 g = a == 0 ? 1 : a;
    const u128 n = diff / g, d = den / g;
    if (n > UINT64_MAX || d > UINT64_MAX) throw ValidationError("ratio overflow");
    return Ratio(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d));
}

Ratio Ratio::operator*(const Ratio& other) const {
    if (is_infinite() || other.is_infinite()) {
        if (num_ == 0 || other.num_ == 0) throw ValidationError("0 * inf is undefined");
        return infinity();
    }
    const std::uint64_t g1 = std::gcd(num_, other.den_);
    const std::uint64_t g2 = std::gcd(other.num_, den_);
    const u128 n = static_cast<u128>(num_ / g1) * (other.num_ / g2);
    const u128 d = static_cast<u128>(den_ / g2) * (other.den_ / g1);
    if (n > UINT64_MAX || d > UINT64_MAX) throw ValidationError("ratio overflow");
    return Ratio(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d));
}

double Ratio::to_double() const {
    if (is_infinite()) return INFINITY;
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Ratio::to_decimal() const {
    if (is_infinite()) return "inf";
    return format_double(to_double());
}

std::string Ratio::to_fraction() const {
    if (is_infinite()) return "inf";
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    if (a.is_infinite() || b.is_infinite()) {
        return a.is_infinite() <=> b.is_infinite();
    }
    const u128 lhs = static_cast<u128>(a.num_) * b.den_;
    const u128 rhs = static_cast<u128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace tdgs
