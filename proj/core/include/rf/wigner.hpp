#pragma once

#include <string>

#include "rf/half_int.hpp"
#include "rf/rational.hpp"

namespace rf::wigner {

// Triangle test result: value 1 iff the three inputs close a triangle with
// integer perimeter.
struct Delta {
    int value = 0;
    explicit operator bool() const { return value != 0; }
    friend bool operator==(const Delta&, const Delta&) = default;
};

Delta triangle(HalfInt a, HalfInt b, HalfInt c);

// (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!, the squared triangle coefficient;
// zero when triangle(a,b,c) fails.
Rational delta_square(HalfInt a, HalfInt b, HalfInt c);

// Exact 3-jm symbol. Returns exact zero for m1+m2+m3 != 0, |m| > j, negative
// j, or a failed triangle; throws std::invalid_argument when some (j,m) pair
// has mismatched parity (j - m not an integer), which is malformed rather
// than merely zero.
SignedSqrtRational three_jm(HalfInt j1, HalfInt j2, HalfInt j3,
                            HalfInt m1, HalfInt m2, HalfInt m3);

// Exact 6-j symbol; zero whenever one of the four triads (j1 j2 j3),
// (j1 j5 j6), (j4 j2 j6), (j4 j5 j3) fails the triangle test.
SignedSqrtRational six_j(HalfInt j1, HalfInt j2, HalfInt j3,
                         HalfInt j4, HalfInt j5, HalfInt j6);

// Outcome of one exact identity check: both sides in closed form, whether
// the left-hand sum stayed in exact arithmetic, and whether the sides agree
// (exact equality when exact; 256-bit floats at 1e-20 otherwise).
struct ExactCheck {
    SignedSqrtRational lhs;
    SignedSqrtRational rhs;
    bool exact = true;
    bool pass = false;
};

// sum_{m,m'} (j j' k; m m' q)(j j' l; m m' p)
//   = delta_{k,l} delta_{q,p} Delta(j,j',k) / (2k+1)
ExactCheck identity_orthogonality_mm(HalfInt j, HalfInt jp, HalfInt k,
                                     HalfInt q, HalfInt l, HalfInt p);

// sum_{k,q} (2k+1)(j j' k; m m' q)(j j' k; M M' q)
//   = delta_{m,M} delta_{m',M'}
ExactCheck identity_orthogonality_kq(HalfInt j, HalfInt jp, HalfInt m,
                                     HalfInt mp, HalfInt M, HalfInt Mp);

// sum_m (-1)^{j-m} (j k j; -m q m) = sqrt(2j+1) delta_{k,0} delta_{q,0}
ExactCheck identity_barycenter(HalfInt j, HalfInt k, HalfInt q);

// sum_{m,m',M} (-1)^{j-M} (j k j; -m q M)(j l j; -M p m')(j K j; -m Q m')
//   = (-1)^{2j-Q} (k l K; -q -p Q) {k l K; j j j}
ExactCheck identity_contraction(HalfInt j, HalfInt k, HalfInt l, HalfInt K,
                                HalfInt q, HalfInt p, HalfInt Q);

struct SuiteCounts {
    long long checked = 0;
    long long computed = 0;  // sums actually evaluated termwise
    long long failed = 0;
};

struct SuiteResult {
    SuiteCounts orthogonality_mm;
    SuiteCounts orthogonality_kq;
    SuiteCounts barycenter;
    SuiteCounts contraction;
    bool all_exact = true;
    std::string first_failure;  // empty when every check passed

    long long checked() const {
        return orthogonality_mm.checked + orthogonality_kq.checked +
               barycenter.checked + contraction.checked;
    }
    long long failed() const {
        return orthogonality_mm.failed + orthogonality_kq.failed +
               barycenter.failed + contraction.failed;
    }
    bool pass() const { return failed() == 0; }
};

// Runs all four identities over every j, j' with twice-value <= max_two_j
// and the full admissible (k,q,l,p,K,Q) boxes, with cached symbol tables.
// Checks whose summation support is empty on selection-rule grounds (and
// whose right-hand side vanishes through the matching Kronecker or magnetic
// factor) are counted without termwise re-derivation. threads <= 1 runs
// inline; larger values partition the (j,j') jobs.
SuiteResult run_identity_suite(int max_two_j, int threads = 1);

}  // namespace rf::wigner
