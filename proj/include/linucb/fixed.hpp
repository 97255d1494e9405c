#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "linucb/errors.hpp"

namespace linucb {

// Signed Q-format fixed point: 64-bit raw value with FracBits fractional
// bits (Q47.16 for the default).  Products and quotients go through a
// 128-bit intermediate and are shifted back with round-to-nearest-even.
// Add/sub/mul/div throw OverflowError when the result leaves the raw range.
template <int FracBits = 16>
class Fixed {
    static_assert(FracBits > 0 && FracBits < 63, "fractional bits must fit a 64-bit raw");

public:
    using raw_t = std::int64_t;
    static constexpr int frac_bits = FracBits;
    static constexpr raw_t one_raw = raw_t{1} << FracBits;

    constexpr Fixed() = default;

    static constexpr Fixed from_raw(raw_t raw) {
        Fixed f;
        f.raw_ = raw;
        return f;
    }

    static Fixed from_double(double x) {
        const double scaled = x * static_cast<double>(one_raw);
        if (!(std::fabs(scaled) < 9.2e18)) {
            throw OverflowError("value " + std::to_string(x) + " outside fixed-point range");
        }
        return from_raw(static_cast<raw_t>(std::nearbyint(scaled)));
    }

    static constexpr Fixed zero() { return Fixed{}; }
    static constexpr Fixed one() { return from_raw(one_raw); }

    constexpr raw_t raw() const { return raw_; }
    double to_double() const { return static_cast<double>(raw_) / static_cast<double>(one_raw); }

    Fixed operator-() const {
        if (raw_ == std::numeric_limits<raw_t>::min()) throw OverflowError("fixed-point negate overflow");
        return from_raw(-raw_);
    }

    Fixed operator+(Fixed o) const {
        raw_t r;
        if (__builtin_add_overflow(raw_, o.raw_, &r)) throw OverflowError("fixed-point add overflow");
        return from_raw(r);
    }

    Fixed operator-(Fixed o) const {
        raw_t r;
        if (__builtin_sub_overflow(raw_, o.raw_, &r)) throw OverflowError("fixed-point sub overflow");
        return from_raw(r);
    }

    Fixed operator*(Fixed o) const {
        const __int128 wide = static_cast<__int128>(raw_) * static_cast<__int128>(o.raw_);
        return from_wide(shift_right_rne(wide, FracBits), "mul");
    }

    Fixed operator/(Fixed o) const {
        if (o.raw_ == 0) throw NumericalError("fixed-point division by zero");
        const __int128 num = static_cast<__int128>(raw_) << FracBits;
        return from_wide(div_rne(num, static_cast<__int128>(o.raw_)), "div");
    }

    Fixed& operator+=(Fixed o) { return *this = *this + o; }
    Fixed& operator-=(Fixed o) { return *this = *this - o; }
    Fixed& operator*=(Fixed o) { return *this = *this * o; }
    Fixed& operator/=(Fixed o) { return *this = *this / o; }

    // sqrt(v) where v = raw / 2^f equals isqrt(raw << f) / 2^f; the integer
    // root is rounded to nearest.
    Fixed sqrt() const {
        if (raw_ < 0) throw NumericalError("fixed-point sqrt of negative value");
        using u128 = unsigned __int128;
        const u128 arg = static_cast<u128>(raw_) << FracBits;
        u128 root = isqrt(arg);
        // round half up on the remainder: pick root+1 when (root+1)^2 is closer
        if (arg - root * root > (root + 1) * (root + 1) - arg) ++root;
        return from_wide(static_cast<__int128>(root), "sqrt");
    }

    friend bool operator==(Fixed a, Fixed b) { return a.raw_ == b.raw_; }
    friend bool operator!=(Fixed a, Fixed b) { return a.raw_ != b.raw_; }
    friend bool operator<(Fixed a, Fixed b) { return a.raw_ < b.raw_; }
    friend bool operator<=(Fixed a, Fixed b) { return a.raw_ <= b.raw_; }
    friend bool operator>(Fixed a, Fixed b) { return a.raw_ > b.raw_; }
    friend bool operator>=(Fixed a, Fixed b) { return a.raw_ >= b.raw_; }

private:
    raw_t raw_ = 0;

    static Fixed from_wide(__int128 v, const char* what) {
        if (v > std::numeric_limits<raw_t>::max() || v < std::numeric_limits<raw_t>::min()) {
            throw OverflowError(std::string("fixed-point ") + what + " overflow");
        }
        return from_raw(static_cast<raw_t>(v));
    }

    // Shift right with round-to-nearest, ties to even.  Works uniformly for
    // negative values through the floor/remainder decomposition.
    static __int128 shift_right_rne(__int128 v, int bits) {
        const __int128 fl = v >> bits;
        const __int128 rem = v - (fl << bits);
        const __int128 half = __int128{1} << (bits - 1);
        if (rem > half || (rem == half && (fl & 1))) return fl + 1;
        return fl;
    }

    static __int128 div_rne(__int128 num, __int128 den) {
        const bool neg = (num < 0) != (den < 0);
        unsigned __int128 a = num < 0 ? static_cast<unsigned __int128>(-num) : static_cast<unsigned __int128>(num);
        unsigned __int128 b = den < 0 ? static_cast<unsigned __int128>(-den) : static_cast<unsigned __int128>(den);
        unsigned __int128 q = a / b;
        const unsigned __int128 r = a % b;
        if (2 * r > b || (2 * r == b && (q & 1))) ++q;
        const __int128 sq = static_cast<__int128>(q);
        return neg ? -sq : sq;
    }

    static unsigned __int128 isqrt(unsigned __int128 x) {
        unsigned __int128 rem = 0, root = 0;
        for (int i = 0; i < 64; ++i) {
            rem = (rem << 2) | (x >> 126);
            x <<= 2;
            root <<= 1;
            if (root + 1 <= rem) {
                rem -= root + 1;
                root += 2;
            }
        }
        return root >> 1;
    }
};

using q16 = Fixed<16>;

}  // namespace linucb
