#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace lbsim {

/// Exact rational with 64-bit numerator/denominator, normalized so that
/// den > 0 and gcd(|num|, den) == 1.  Comparisons go through 128-bit
/// intermediates, so they are exact for every value the allocator produces.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }
    static Rational integer(std::int64_t n) { return Rational(n, 1); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    /// Exact rational from a finite double (every double is dyadic).
    /// Throws if the value cannot fit the 64-bit representation.
    static Rational from_double(double x) {
        if (!std::isfinite(x)) throw std::invalid_argument("Rational: non-finite value");
        if (x == std::floor(x) && std::abs(x) < 9.0e18) {
            return integer(static_cast<std::int64_t>(x));
        }
        int exp = 0;
        double m = std::frexp(x, &exp); // x = m * 2^exp, |m| in [0.5, 1)
        // 53 mantissa bits
        auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
        exp -= 53;
        while (mant != 0 && (mant & 1) == 0) { mant >>= 1; ++exp; }
        if (exp >= 0) {
            if (exp > 9) throw std::invalid_argument("Rational: value too large");
            return integer(mant << exp);
        }
        if (-exp > 62) throw std::invalid_argument("Rational: denominator overflow");
        return Rational(mant, std::int64_t{1} << -exp);
    }
};

/// floor(a/b + 1/2) for a >= 0, b > 0: the round-half-up division both
/// allocation branches share.
inline std::int64_t div_round_half_up(__int128 a, __int128 b) {
    return static_cast<std::int64_t>((2 * a + b) / (2 * b));
}

} // namespace lbsim
