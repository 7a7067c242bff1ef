#include "rf/rational.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "rf/half_int.hpp"

namespace rf {

namespace {

// Grow-only prime table for radicand factorization. Entries never move once
// published.
class PrimeTable {
  public:
    // Primes p_0.. up to at least `limit`; returns the count published.
    size_t ensure_limit(unsigned limit) {
        if (limit <= limit_.load(std::memory_order_acquire))
            return count_.load(std::memory_order_acquire);
        std::lock_guard<std::mutex> lock(grow_);
        unsigned cur = limit_.load(std::memory_order_relaxed);
        if (cur < limit) sieve_to(std::max(limit, cur * 2));
        return count_.load(std::memory_order_acquire);
    }

    unsigned prime(size_t i) const { return primes_[i]; }

  private:
    void sieve_to(unsigned n) {
        std::vector<bool> composite(n + 1, false);
        for (unsigned p = 2; p * p <= n; ++p)
            if (!composite[p])
                for (unsigned q = p * p; q <= n; q += p) composite[q] = true;
        for (unsigned p = (limit_.load(std::memory_order_relaxed) + 1); p <= n; ++p)
            if (p >= 2 && !composite[p]) primes_.push_back(p);
        limit_.store(n, std::memory_order_release);
        count_.store(primes_.size(), std::memory_order_release);
    }

    std::deque<unsigned> primes_;
    std::atomic<unsigned> limit_{1};
    std::atomic<size_t> count_{0};
    std::mutex grow_;
};

PrimeTable& prime_table() {
    static PrimeTable t;
    return t;
}

// Splits n (positive) into square * squarefree. Complete for smooth n, which
// covers every radicand produced by factorial products; a residual cofactor
// that resists the trial bound is tested as a perfect square and otherwise
// left inside the squarefree part.
void split_square(const Integer& n, Integer& sqrt_square_part, Integer& squarefree) {
    sqrt_square_part = 1;
    squarefree = 1;
    Integer rest = n;
    unsigned bound = 1u << 10;
    size_t count = prime_table().ensure_limit(bound);
    size_t i = 0;
    Integer q, r;
    while (rest > 1) {
        if (i >= count) {
            if (bound >= (1u << 20)) break;
            bound *= 2;
            count = prime_table().ensure_limit(bound);
            continue;
        }
        unsigned p = prime_table().prime(i);
        // Stop early once p^2 exceeds the remainder: it is prime.
        if (Integer(p) * p > rest) {
            squarefree *= rest;
            rest = 1;
            break;
        }
        unsigned e = 0;
        while (true) {
            mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), rest.get_mpz_t(), p);
            if (r != 0) break;
            rest = q;
            ++e;
        }
        if (e & 1) squarefree *= p;
        if (e > 1) {
            Integer pk;
            mpz_ui_pow_ui(pk.get_mpz_t(), p, e / 2);
            sqrt_square_part *= pk;
        }
        ++i;
    }
    if (rest > 1) {
        if (mpz_perfect_square_p(rest.get_mpz_t())) {
            Integer s;
            mpz_sqrt(s.get_mpz_t(), rest.get_mpz_t());
            sqrt_square_part *= s;
        } else {
            squarefree *= rest;
        }
    }
}

}  // namespace

const Integer& factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial of negative integer");
    static std::deque<Integer> cache{Integer(1)};
    static std::atomic<size_t> published{1};
    static std::mutex grow;
    size_t have = published.load(std::memory_order_acquire);
    if (static_cast<size_t>(n) < have) return cache[n];
    std::lock_guard<std::mutex> lock(grow);
    for (size_t i = published.load(std::memory_order_relaxed);
         i <= static_cast<size_t>(n); ++i) {
        cache.push_back(cache[i - 1] * static_cast<unsigned long>(i));
        published.store(i + 1, std::memory_order_release);
    }
    return cache[n];
}

int sign_of(const Rational& r) { return sgn(r); }

double to_double(const Rational& r) { return r.get_d(); }

std::string to_string(const Rational& r) { return r.get_str(); }

SignedSqrtRational SignedSqrtRational::from_sign_square(int sign, const Rational& square) {
    if (sgn(square) < 0)
        throw std::invalid_argument("SignedSqrtRational: negative square");
    if (sign == 0 || sgn(square) == 0) return zero();
    Rational coeff(sign > 0 ? 1 : -1);
    return from_coeff_radicand(coeff, square);
}

SignedSqrtRational SignedSqrtRational::from_rational(const Rational& r) {
    SignedSqrtRational v;
    v.coeff_ = r;
    v.coeff_.canonicalize();
    v.root_ = 1;
    return v;
}

SignedSqrtRational SignedSqrtRational::from_coeff_radicand(const Rational& coeff,
                                                           const Rational& radicand) {
    if (sgn(radicand) < 0)
        throw std::invalid_argument("SignedSqrtRational: negative radicand");
    if (sgn(coeff) == 0 || sgn(radicand) == 0) return zero();
    // sqrt(n/d) = sqrt(n*d)/d
    Rational rad = radicand;
    rad.canonicalize();
    Integer nd = rad.get_num() * rad.get_den();
    Integer sq, root;
    split_square(nd, sq, root);
    SignedSqrtRational v;
    v.coeff_ = coeff * Rational(sq, rad.get_den());
    v.coeff_.canonicalize();
    v.root_ = root;
    return v;
}

int SignedSqrtRational::sign() const { return sgn(coeff_); }

Rational SignedSqrtRational::square() const {
    Rational s = coeff_ * coeff_;
    s *= Rational(root_);
    s.canonicalize();
    return s;
}

SignedSqrtRational SignedSqrtRational::operator-() const {
    SignedSqrtRational v = *this;
    v.coeff_ = -v.coeff_;
    return v;
}

SignedSqrtRational SignedSqrtRational::operator*(const SignedSqrtRational& rhs) const {
    if (is_zero() || rhs.is_zero()) return zero();
    SignedSqrtRational v;
    v.coeff_ = coeff_ * rhs.coeff_;
    if (root_ == rhs.root_) {
        // sqrt(r)*sqrt(r) = r
        v.coeff_ *= Rational(root_);
        v.root_ = 1;
    } else {
        // Both roots squarefree: product reduces through their gcd.
        Integer g;
        mpz_gcd(g.get_mpz_t(), root_.get_mpz_t(), rhs.root_.get_mpz_t());
        v.coeff_ *= Rational(g);
        v.root_ = (root_ / g) * (rhs.root_ / g);
    }
    v.coeff_.canonicalize();
    return v;
}

SignedSqrtRational& SignedSqrtRational::operator*=(const Rational& r) {
    if (sgn(r) == 0) {
        *this = zero();
        return *this;
    }
    coeff_ *= r;
    coeff_.canonicalize();
    return *this;
}

double SignedSqrtRational::to_double() const {
    if (is_zero()) return 0.0;
    return coeff_.get_d() * std::sqrt(root_.get_d());
}

mpf_class SignedSqrtRational::to_mpf() const {
    mpf_class c(coeff_, 256);
    mpf_class r(root_, 256);
    mpf_class s(0, 256);
    mpf_sqrt(s.get_mpf_t(), r.get_mpf_t());
    return c * s;
}

std::string SignedSqrtRational::str() const {
    if (is_zero()) return "0";
    if (is_rational()) {
        std::string s = coeff_.get_str();
        if (sgn(coeff_) > 0) s = "+" + s;
        return s;
    }
    Rational sq = square();
    std::string s = sign() > 0 ? "+" : "-";
    return s + "sqrt(" + sq.get_str() + ")";
}

namespace detail {

SignedSqrtRational make_canonical(const Rational& coeff, const Integer& squarefree_root) {
    if (sgn(coeff) == 0) return SignedSqrtRational::zero();
    SignedSqrtRational v;
    v.coeff_ = coeff;
    v.coeff_.canonicalize();
    v.root_ = squarefree_root;
    return v;
}

}  // namespace detail

std::optional<SignedSqrtRational> try_add(const SignedSqrtRational& a,
                                          const SignedSqrtRational& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.root_ != b.root_) return std::nullopt;
    SignedSqrtRational v;
    v.coeff_ = a.coeff_ + b.coeff_;
    if (sgn(v.coeff_) == 0) return SignedSqrtRational::zero();
    v.coeff_.canonicalize();
    v.root_ = a.root_;
    return v;
}

void ExactSum::add(const SignedSqrtRational& term) {
    if (exact_) {
        if (auto s = try_add(acc_, term)) {
            acc_ = *s;
            return;
        }
        exact_ = false;
        approx_ = acc_.to_mpf();
    }
    approx_ += term.to_mpf();
}

mpf_class ExactSum::approx() const {
    if (exact_) return acc_.to_mpf();
    return approx_;
}

HalfInt parse_half_int(std::string_view text) {
    auto fail = [&] {
        throw std::invalid_argument("not a half-integer: '" + std::string(text) + "'");
    };
    std::string_view s = text;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) fail();
    auto slash = s.find('/');
    int num = 0;
    {
        std::string_view head = s.substr(0, slash);
        auto [p, ec] = std::from_chars(head.data(), head.data() + head.size(), num);
        if (ec != std::errc() || p != head.data() + head.size()) fail();
    }
    if (slash == std::string_view::npos) return HalfInt::whole(num);
    std::string_view tail = s.substr(slash + 1);
    if (tail != "2") fail();
    return HalfInt::from_twice(num);
}

}  // namespace rf
