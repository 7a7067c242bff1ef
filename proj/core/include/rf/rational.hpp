#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace rf {

using Integer = mpz_class;
// Always kept canonical: lowest terms, positive denominator.
using Rational = mpq_class;

// n!, cached incrementally and shared per process. The returned reference
// stays valid for the process lifetime; concurrent readers are safe, growth is
// serialized.
const Integer& factorial(int n);

int sign_of(const Rational& r);
double to_double(const Rational& r);
std::string to_string(const Rational& r);

class SignedSqrtRational;

namespace detail {
// coeff * sqrt(root) with root already a positive squarefree integer; used
// by summation kernels that track the shared radical themselves.
SignedSqrtRational make_canonical(const Rational& coeff, const Integer& squarefree_root);
}  // namespace detail

// Exact value sign * sqrt(square) with square a nonnegative rational.
//
// Stored canonically as coeff * sqrt(root) with root a positive squarefree
// integer and the sign carried by coeff, so equal values have equal
// representations and sums of like radicals stay closed. Radicands met here
// are products of factorials, hence smooth; square parts are peeled off by
// trial division over a growing prime table.
class SignedSqrtRational {
  public:
    // Zero.
    SignedSqrtRational() : coeff_(0), root_(1) {}

    static SignedSqrtRational zero() { return {}; }

    // sign * sqrt(square); sign may be any int, only its signum is used.
    static SignedSqrtRational from_sign_square(int sign, const Rational& square);

    // Exact rational value r (root 1).
    static SignedSqrtRational from_rational(const Rational& r);

    // coeff * sqrt(radicand), radicand >= 0.
    static SignedSqrtRational from_coeff_radicand(const Rational& coeff,
                                                  const Rational& radicand);

    int sign() const;
    // The exact square of the value, coeff^2 * root.
    Rational square() const;

    const Rational& coeff() const { return coeff_; }
    const Integer& root() const { return root_; }

    bool is_zero() const { return sgn(coeff_) == 0; }
    bool is_rational() const { return root_ == 1; }
    // Requires is_rational().
    const Rational& rational_value() const { return coeff_; }

    SignedSqrtRational operator-() const;
    SignedSqrtRational operator*(const SignedSqrtRational& rhs) const;
    SignedSqrtRational& operator*=(const Rational& r);

    // Value-level exact equality (independent of representation).
    bool operator==(const SignedSqrtRational& rhs) const {
        return sign() == rhs.sign() && square() == rhs.square();
    }

    double to_double() const;
    // 256-bit float value, for the non-exact fallback comparisons.
    mpf_class to_mpf() const;

    // "+sqrt(1/3)", "-1/3", "0": rational values print as signed fractions,
    // irrational ones as sign and sqrt of the exact square.
    std::string str() const;

  private:
    friend std::optional<SignedSqrtRational> try_add(const SignedSqrtRational&,
                                                     const SignedSqrtRational&);
    friend SignedSqrtRational detail::make_canonical(const Rational&, const Integer&);

    Rational coeff_;
    Integer root_;  // squarefree, >= 1; root_ == 1 whenever coeff_ == 0
};

// a + b when the result is again sign*sqrt(rational), i.e. when the two
// canonical roots coincide (or either side is zero); nullopt otherwise.
std::optional<SignedSqrtRational> try_add(const SignedSqrtRational& a,
                                          const SignedSqrtRational& b);

// Accumulates SignedSqrtRational terms, staying exact while the radicals
// group; on the first ungroupable term it degrades to a 256-bit float
// accumulator and reports exact() == false.
class ExactSum {
  public:
    ExactSum() : approx_(0, kPrecisionBits) {}

    void add(const SignedSqrtRational& term);
    bool exact() const { return exact_; }
    // Requires exact().
    const SignedSqrtRational& value() const { return acc_; }
    mpf_class approx() const;

  private:
    static constexpr int kPrecisionBits = 256;
    SignedSqrtRational acc_;
    bool exact_ = true;
    mpf_class approx_;
};

}  // namespace rf
