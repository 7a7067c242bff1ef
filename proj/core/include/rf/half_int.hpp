#pragma once

#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rf {

// Angular momentum or magnetic quantum number, stored as twice its value so
// half-integers stay exact: HalfInt::from_twice(3) is 3/2.
class HalfInt {
  public:
    constexpr HalfInt() = default;

    static constexpr HalfInt from_twice(int t) {
        HalfInt h;
        h.twice_ = t;
        return h;
    }

    // j given as a whole number (twice = 2j).
    static constexpr HalfInt whole(int j) { return from_twice(2 * j); }

    constexpr int twice() const { return twice_; }
    constexpr bool is_integer() const { return (twice_ & 1) == 0; }
    constexpr bool is_negative() const { return twice_ < 0; }
    constexpr double value() const { return 0.5 * twice_; }

    // Requires is_integer().
    constexpr int as_int() const { return twice_ / 2; }

    constexpr HalfInt operator-() const { return from_twice(-twice_); }

    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) {
        return from_twice(a.twice_ + b.twice_);
    }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) {
        return from_twice(a.twice_ - b.twice_);
    }
    friend constexpr auto operator<=>(HalfInt a, HalfInt b) = default;

    // "3/2", "-1/2", "2"
    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

  private:
    int twice_ = 0;
};

// A (j, m) pair is valid when |m| <= j and j - m is integral (same parity of
// twice-values).
constexpr bool valid_jm(HalfInt j, HalfInt m) {
    if (((j.twice() ^ m.twice()) & 1) != 0) return false;
    return std::abs(m.twice()) <= j.twice();
}

// Same parity of twice-values, i.e. j - m integral, without the range check.
constexpr bool same_parity(HalfInt j, HalfInt m) {
    return ((j.twice() ^ m.twice()) & 1) == 0;
}

// (-1)^(e) for an integral exponent held as a HalfInt difference.
constexpr int parity_sign(int exponent) { return (exponent & 1) ? -1 : 1; }

// Parses "3/2", "-1/2", "2", "+1". Whole numbers and explicit /2 fractions
// only; anything else throws std::invalid_argument.
HalfInt parse_half_int(std::string_view text);

}  // namespace rf
