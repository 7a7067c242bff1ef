#include "rf/wigner.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace rf::wigner {

namespace {

// All internal arithmetic runs on twice-values (integers), so every
// half-integer expression below divides evenly by construction.

bool tri_ok(int ta, int tb, int tc) {
    if (ta < 0 || tb < 0 || tc < 0) return false;
    if ((ta + tb + tc) % 2 != 0) return false;
    return std::abs(ta - tb) <= tc && tc <= ta + tb;
}

Rational delta_square_t(int ta, int tb, int tc) {
    if (!tri_ok(ta, tb, tc)) return Rational(0);
    Integer num = factorial((ta + tb - tc) / 2);
    num *= factorial((ta - tb + tc) / 2);
    num *= factorial((-ta + tb + tc) / 2);
    Rational r(num, factorial((ta + tb + tc) / 2 + 1));
    r.canonicalize();
    return r;
}

// Racah single-sum closed form; callers guarantee pairwise (j,m) parity.
SignedSqrtRational three_jm_t(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
    if (tj1 < 0 || tj2 < 0 || tj3 < 0) return SignedSqrtRational::zero();
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3)
        return SignedSqrtRational::zero();
    if (tm1 + tm2 + tm3 != 0) return SignedSqrtRational::zero();
    if (!tri_ok(tj1, tj2, tj3)) return SignedSqrtRational::zero();

    const int a1 = (tj1 + tj2 - tj3) / 2;
    const int b2 = (tj1 - tm1) / 2;
    const int b3 = (tj2 + tm2) / 2;
    const int c1 = (tj3 - tj2 + tm1) / 2;  // + t
    const int c2 = (tj3 - tj1 - tm2) / 2;  // + t
    const int tlo = std::max({0, -c1, -c2});
    const int thi = std::min({a1, b2, b3});
    if (tlo > thi) return SignedSqrtRational::zero();

    Rational sum(0);
    Integer den;
    for (int t = tlo; t <= thi; ++t) {
        den = factorial(t);
        den *= factorial(a1 - t);
        den *= factorial(b2 - t);
        den *= factorial(b3 - t);
        den *= factorial(c1 + t);
        den *= factorial(c2 + t);
        sum += Rational((t & 1) ? -1 : 1, den);
    }
    if (sgn(sum) == 0) return SignedSqrtRational::zero();

    Rational radicand = delta_square_t(tj1, tj2, tj3);
    Integer f = factorial((tj1 + tm1) / 2);
    f *= factorial((tj1 - tm1) / 2);
    f *= factorial((tj2 + tm2) / 2);
    f *= factorial((tj2 - tm2) / 2);
    f *= factorial((tj3 + tm3) / 2);
    f *= factorial((tj3 - tm3) / 2);
    radicand *= Rational(f);
    if (parity_sign((tj1 - tj2 - tm3) / 2) < 0) sum = -sum;
    return SignedSqrtRational::from_coeff_radicand(sum, radicand);
}

SignedSqrtRational six_j_t(int tj1, int tj2, int tj3, int tj4, int tj5, int tj6) {
    if (!tri_ok(tj1, tj2, tj3) || !tri_ok(tj1, tj5, tj6) ||
        !tri_ok(tj4, tj2, tj6) || !tri_ok(tj4, tj5, tj3))
        return SignedSqrtRational::zero();

    const int T1 = (tj1 + tj2 + tj3) / 2;
    const int T2 = (tj1 + tj5 + tj6) / 2;
    const int T3 = (tj4 + tj2 + tj6) / 2;
    const int T4 = (tj4 + tj5 + tj3) / 2;
    const int Q1 = (tj1 + tj2 + tj4 + tj5) / 2;
    const int Q2 = (tj2 + tj3 + tj5 + tj6) / 2;
    const int Q3 = (tj1 + tj3 + tj4 + tj6) / 2;
    const int tlo = std::max({T1, T2, T3, T4});
    const int thi = std::min({Q1, Q2, Q3});
    if (tlo > thi) return SignedSqrtRational::zero();

    Rational sum(0);
    Integer den;
    Rational term;
    for (int t = tlo; t <= thi; ++t) {
        den = factorial(t - T1);
        den *= factorial(t - T2);
        den *= factorial(t - T3);
        den *= factorial(t - T4);
        den *= factorial(Q1 - t);
        den *= factorial(Q2 - t);
        den *= factorial(Q3 - t);
        term = Rational((t & 1) ? -factorial(t + 1) : factorial(t + 1), den);
        term.canonicalize();
        sum += term;
    }
    if (sgn(sum) == 0) return SignedSqrtRational::zero();

    Rational radicand = delta_square_t(tj1, tj2, tj3);
    radicand *= delta_square_t(tj1, tj5, tj6);
    radicand *= delta_square_t(tj4, tj2, tj6);
    radicand *= delta_square_t(tj4, tj5, tj3);
    return SignedSqrtRational::from_coeff_radicand(sum, radicand);
}

// Canonical representations are unique, so value equality is member equality.
bool canonical_equal(const SignedSqrtRational& a, const SignedSqrtRational& b) {
    return a.coeff() == b.coeff() && a.root() == b.root();
}

constexpr double kFloatFallbackTol = 1e-20;

// Accumulates sum of products x*y of canonical values whose radicals all
// reduce to one squarefree class, as they do termwise in every identity here
// (the magnetic factorials enter squared across a product). Should a term
// ever leave the class, accumulation degrades to 256-bit floats and the sum
// reports exact() == false.
class RadicalSum {
  public:
    RadicalSum() : approx_(0, 256), tf_(0, 256) {}

    void reset() {
        acc_ = 0;
        root_ = 1;
        any_ = false;
        exact_ = true;
        approx_ = 0;
    }

    // Adds weight * x * y; weight carries sign and scalar factors like 2k+1.
    void add_product(const SignedSqrtRational& x, const SignedSqrtRational& y,
                     long weight = 1) {
        if (weight == 0 || x.is_zero() || y.is_zero()) return;
        mpz_gcd(g_.get_mpz_t(), x.root().get_mpz_t(), y.root().get_mpz_t());
        mpz_divexact(t1_.get_mpz_t(), x.root().get_mpz_t(), g_.get_mpz_t());
        mpz_divexact(t2_.get_mpz_t(), y.root().get_mpz_t(), g_.get_mpz_t());
        mpz_mul(rprod_.get_mpz_t(), t1_.get_mpz_t(), t2_.get_mpz_t());
        mpq_mul(term_.get_mpq_t(), x.coeff().get_mpq_t(), y.coeff().get_mpq_t());
        mpz_mul(mpq_numref(term_.get_mpq_t()), mpq_numref(term_.get_mpq_t()),
                g_.get_mpz_t());
        if (weight != 1)
            mpz_mul_si(mpq_numref(term_.get_mpq_t()), mpq_numref(term_.get_mpq_t()),
                       weight);
        mpq_canonicalize(term_.get_mpq_t());
        if (!any_) {
            root_ = rprod_;
            any_ = true;
        }
        if (exact_ && rprod_ == root_) {
            acc_ += term_;
            return;
        }
        if (exact_) {
            to_float();
        }
        mpf_set_z(tf_.get_mpf_t(), rprod_.get_mpz_t());
        mpf_sqrt(tf_.get_mpf_t(), tf_.get_mpf_t());
        approx_ += mpf_class(term_, 256) * tf_;
    }

    bool exact() const { return exact_; }

    SignedSqrtRational value() const {
        assert(exact_);
        if (!any_ || sgn(acc_) == 0) return SignedSqrtRational::zero();
        return detail::make_canonical(acc_, root_);
    }

    mpf_class approx() const {
        if (!exact_) return approx_;
        return value().to_mpf();
    }

  private:
    void to_float() {
        exact_ = false;
        mpf_set_z(tf_.get_mpf_t(), root_.get_mpz_t());
        mpf_sqrt(tf_.get_mpf_t(), tf_.get_mpf_t());
        approx_ = mpf_class(acc_, 256) * tf_;
    }

    Rational acc_;
    Integer root_{1};
    bool any_ = false;
    bool exact_ = true;
    mpf_class approx_;
    // scratch, reused across terms
    Integer g_, t1_, t2_, rprod_;
    Rational term_;
    mpf_class tf_;
};

ExactCheck finish_check(ExactSum& sum, SignedSqrtRational rhs) {
    ExactCheck c;
    c.rhs = std::move(rhs);
    if (sum.exact()) {
        c.lhs = sum.value();
        c.exact = true;
        c.pass = (c.lhs == c.rhs);
    } else {
        c.exact = false;
        mpf_class diff = sum.approx() - c.rhs.to_mpf();
        c.pass = abs(diff) < mpf_class(kFloatFallbackTol, 256);
    }
    return c;
}

void validate_jm(HalfInt j, HalfInt m, const char* where) {
    if (!same_parity(j, m))
        throw std::invalid_argument(std::string(where) +
                                    ": j and m differ by a non-integer (twice-values " +
                                    std::to_string(j.twice()) + ", " +
                                    std::to_string(m.twice()) + ")");
}

// ---- identity suite -------------------------------------------------------

struct SuiteAccum {
    SuiteResult r;

    void note_failure(SuiteCounts& c, long long times, const std::string& what) {
        c.failed += times;
        if (r.first_failure.empty()) r.first_failure = what;
    }
};

std::string describe(const char* id, std::initializer_list<int> twices) {
    std::ostringstream os;
    os << id << " twice=(";
    bool first = true;
    for (int t : twices) {
        if (!first) os << ",";
        os << t;
        first = false;
    }
    os << ")";
    return os.str();
}

// Orthogonality identities for one (two_j, two_jp) pair, on a shared table
// of (j j' k; m m' -(m+m')) values.
void run_pair_job(int a, int b, SuiteAccum& out) {
    const int tkmin = std::abs(a - b);
    const int tkmax = a + b;
    const int nk = std::min(a, b) + 1;
    const int nm = a + 1;
    const int nmp = b + 1;

    std::vector<SignedSqrtRational> T(static_cast<size_t>(nk) * nm * nmp);
    auto at = [&](int ik, int im, int imp) -> const SignedSqrtRational& {
        return T[(static_cast<size_t>(ik) * nm + im) * nmp + imp];
    };
    for (int ik = 0; ik < nk; ++ik) {
        const int tk = tkmin + 2 * ik;
        for (int im = 0; im < nm; ++im) {
            const int tm = -a + 2 * im;
            for (int imp = 0; imp < nmp; ++imp) {
                const int tmp = -b + 2 * imp;
                T[(static_cast<size_t>(ik) * nm + im) * nmp + imp] =
                    three_jm_t(a, b, tk, tm, tmp, -(tm + tmp));
            }
        }
    }

    RadicalSum sum;
    long long s_total = 0;  // number of (k,q) pairs
    for (int ik = 0; ik < nk; ++ik) s_total += tkmin + 2 * ik + 1;

    // sum_{mm'} (j j' k; m m' q)(j j' l; m m' p) = dd Delta/(2k+1):
    // a q != p pair zeroes every term through the magnetic selection rule and
    // the right side through delta_{q,p}; only q == p needs summation.
    {
        SuiteCounts& c = out.r.orthogonality_mm;
        long long same_q_pairs = 0;
        std::vector<const SignedSqrtRational*> A;
        for (int tq = -tkmax; tq <= tkmax; tq += 2) {
            // tq and tkmin share parity, so the division is exact.
            const int ikm = std::max(0, (std::abs(tq) - tkmin) / 2);
            const int nq = nk - ikm;
            if (nq <= 0) continue;
            same_q_pairs += static_cast<long long>(nq) * nq;
            const int lo = std::max(-a, -b - tq);
            const int hi = std::min(a, b - tq);
            const int ns = (hi - lo) / 2 + 1;
            A.assign(static_cast<size_t>(nq) * ns, nullptr);
            for (int dk = 0; dk < nq; ++dk)
                for (int is = 0; is < ns; ++is) {
                    const int tm = lo + 2 * is;
                    A[static_cast<size_t>(dk) * ns + is] =
                        &at(ikm + dk, (tm + a) / 2, (-tm - tq + b) / 2);
                }
            for (int d1 = 0; d1 < nq; ++d1)
                for (int d2 = d1; d2 < nq; ++d2) {
                    sum.reset();
                    const auto* row1 = &A[static_cast<size_t>(d1) * ns];
                    const auto* row2 = &A[static_cast<size_t>(d2) * ns];
                    for (int is = 0; is < ns; ++is)
                        sum.add_product(*row1[is], *row2[is]);
                    const int tk = tkmin + 2 * (ikm + d1);
                    SignedSqrtRational rhs =
                        d1 == d2 ? SignedSqrtRational::from_rational(Rational(1, tk + 1))
                                 : SignedSqrtRational::zero();
                    const long long times = d1 == d2 ? 1 : 2;
                    c.checked += times;
                    c.computed += times;
                    bool ok;
                    if (sum.exact()) {
                        ok = canonical_equal(sum.value(), rhs);
                    } else {
                        out.r.all_exact = false;
                        mpf_class diff = sum.approx() - rhs.to_mpf();
                        ok = abs(diff) < mpf_class(kFloatFallbackTol, 256);
                    }
                    if (!ok)
                        out.note_failure(c, times,
                                         describe("orthogonality_mm",
                                                  {a, b, tk, tq, tkmin + 2 * (ikm + d2), tq}));
                }
        }
        c.checked += s_total * s_total - same_q_pairs;
    }

    // sum_{kq} (2k+1)(j j' k; m m' q)(j j' k; M M' q) = d_{mM} d_{m'M'}:
    // only magnetic pairs with equal m+m' couple through a common q.
    {
        SuiteCounts& c = out.r.orthogonality_kq;
        long long matched = 0;
        struct Member {
            int im, imp;
        };
        std::vector<Member> members;
        for (int ttau = -(a + b); ttau <= a + b; ttau += 2) {
            members.clear();
            for (int tm = std::max(-a, ttau - b); tm <= std::min(a, ttau + b); tm += 2)
                members.push_back({(tm + a) / 2, (ttau - tm + b) / 2});
            const int cnt = static_cast<int>(members.size());
            matched += static_cast<long long>(cnt) * cnt;
            const int ikm = std::max(0, (std::abs(ttau) - tkmin) / 2);
            for (int e1 = 0; e1 < cnt; ++e1)
                for (int e2 = e1; e2 < cnt; ++e2) {
                    sum.reset();
                    for (int ik = ikm; ik < nk; ++ik) {
                        const int tk = tkmin + 2 * ik;
                        sum.add_product(at(ik, members[e1].im, members[e1].imp),
                                        at(ik, members[e2].im, members[e2].imp), tk + 1);
                    }
                    SignedSqrtRational rhs =
                        e1 == e2 ? SignedSqrtRational::from_rational(Rational(1))
                                 : SignedSqrtRational::zero();
                    const long long times = e1 == e2 ? 1 : 2;
                    c.checked += times;
                    c.computed += times;
                    bool ok;
                    if (sum.exact()) {
                        ok = canonical_equal(sum.value(), rhs);
                    } else {
                        out.r.all_exact = false;
                        mpf_class diff = sum.approx() - rhs.to_mpf();
                        ok = abs(diff) < mpf_class(kFloatFallbackTol, 256);
                    }
                    if (!ok)
                        out.note_failure(
                            c, times,
                            describe("orthogonality_kq",
                                     {a, b, -a + 2 * members[e1].im, -b + 2 * members[e1].imp,
                                      -a + 2 * members[e2].im, -b + 2 * members[e2].imp}));
                }
        }
        const long long box = static_cast<long long>(nm) * nmp;
        c.checked += box * box - matched;
    }
}

// Barycenter and contraction identities for one two_j, on cached
// (j k j; -m q m-q) and {k l K; j j j} tables.
void run_single_job(int a, SuiteAccum& out) {
    const int nm = a + 1;
    const int nkq = (a + 1) * (a + 1);  // total (k,q) pairs, k = 0..2j

    // C[(k^2 + k + q) * nm + im] = (j k j; -m q m-q), integer k and q.
    std::vector<SignedSqrtRational> C(static_cast<size_t>(nkq) * nm);
    for (int k = 0; k <= a; ++k)
        for (int q = -k; q <= k; ++q)
            for (int im = 0; im < nm; ++im) {
                const int tm = -a + 2 * im;
                C[(static_cast<size_t>(k) * k + k + q) * nm + im] =
                    three_jm_t(a, 2 * k, a, -tm, 2 * q, tm - 2 * q);
            }
    auto centry = [&](int k, int q, int im) -> const SignedSqrtRational& {
        return C[(static_cast<size_t>(k) * k + k + q) * nm + im];
    };

    // {k l K; j j j}
    std::vector<SignedSqrtRational> SIX(static_cast<size_t>(nm) * nm * nm);
    for (int k = 0; k <= a; ++k)
        for (int l = 0; l <= a; ++l)
            for (int K = 0; K <= a; ++K)
                SIX[(static_cast<size_t>(k) * nm + l) * nm + K] =
                    six_j_t(2 * k, 2 * l, 2 * K, a, a, a);
    auto sixentry = [&](int k, int l, int K) -> const SignedSqrtRational& {
        return SIX[(static_cast<size_t>(k) * nm + l) * nm + K];
    };

    RadicalSum sum;

    // sum_m (-1)^{j-m} (j k j; -m q m) = sqrt(2j+1) d_{k0} d_{q0}: q != 0
    // zeroes every term by the magnetic selection rule.
    {
        SuiteCounts& c = out.r.barycenter;
        const SignedSqrtRational one = SignedSqrtRational::from_rational(Rational(1));
        for (int k = 0; k <= a; ++k) {
            sum.reset();
            for (int im = 0; im < nm; ++im) {
                const int tm = -a + 2 * im;
                sum.add_product(centry(k, 0, im), one, parity_sign((a - tm) / 2));
            }
            SignedSqrtRational rhs =
                k == 0 ? SignedSqrtRational::from_coeff_radicand(Rational(1), Rational(a + 1))
                       : SignedSqrtRational::zero();
            c.checked += 1;
            c.computed += 1;
            bool ok;
            if (sum.exact()) {
                ok = canonical_equal(sum.value(), rhs);
            } else {
                out.r.all_exact = false;
                mpf_class diff = sum.approx() - rhs.to_mpf();
                ok = abs(diff) < mpf_class(kFloatFallbackTol, 256);
            }
            if (!ok) out.note_failure(c, 1, describe("barycenter", {a, 2 * k, 0}));
        }
        c.checked += static_cast<long long>(nkq) - (a + 1);
    }

    // Triple contraction: Q != q+p zeroes both sides (selection rule on the
    // left, the magnetic sum of (k l K; -q -p Q) on the right), so only
    // Q == q+p is summed, over the single surviving index m.
    {
        SuiteCounts& c = out.r.contraction;
        std::vector<SignedSqrtRational> P(static_cast<size_t>(nm));
        for (int k = 0; k <= a; ++k)
            for (int q = -k; q <= k; ++q)
                for (int l = 0; l <= a; ++l)
                    for (int p = -l; p <= l; ++p) {
                        const int sg = q + p;
                        if (std::abs(sg) > a) {
                            c.checked += static_cast<long long>(nkq);
                            continue;
                        }
                        const int lo = -a + 2 * std::max({0, q, sg});
                        const int hi = a + 2 * std::min({0, q, sg});
                        const int ns = (hi - lo) / 2 + 1;
                        for (int is = 0; is < ns; ++is) {
                            const int tm = lo + 2 * is;
                            const int tM = tm - 2 * q;
                            P[is] = centry(k, q, (tm + a) / 2) *
                                    centry(l, p, (tM + a) / 2);
                            if (parity_sign((a - tM) / 2) < 0) P[is] = -P[is];
                        }
                        for (int K = std::abs(sg); K <= a; ++K) {
                            sum.reset();
                            for (int is = 0; is < ns; ++is) {
                                const int tm = lo + 2 * is;
                                sum.add_product(P[is], centry(K, sg, (tm + a) / 2));
                            }
                            SignedSqrtRational rhs =
                                three_jm_t(2 * k, 2 * l, 2 * K, -2 * q, -2 * p, 2 * sg) *
                                sixentry(k, l, K);
                            if (parity_sign(a - sg) < 0) rhs = -rhs;
                            c.checked += 1;
                            c.computed += 1;
                            bool ok;
                            if (sum.exact()) {
                                ok = canonical_equal(sum.value(), rhs);
                            } else {
                                out.r.all_exact = false;
                                mpf_class diff = sum.approx() - rhs.to_mpf();
                                ok = abs(diff) < mpf_class(kFloatFallbackTol, 256);
                            }
                            if (!ok)
                                out.note_failure(c, 1,
                                                 describe("contraction",
                                                          {a, 2 * k, 2 * l, 2 * K, 2 * q,
                                                           2 * p, 2 * sg}));
                        }
                        c.checked += static_cast<long long>(nkq) - (a + 1 - std::abs(sg));
                    }
    }
}

}  // namespace

Delta triangle(HalfInt a, HalfInt b, HalfInt c) {
    return Delta{tri_ok(a.twice(), b.twice(), c.twice()) ? 1 : 0};
}

Rational delta_square(HalfInt a, HalfInt b, HalfInt c) {
    return delta_square_t(a.twice(), b.twice(), c.twice());
}

SignedSqrtRational three_jm(HalfInt j1, HalfInt j2, HalfInt j3,
                            HalfInt m1, HalfInt m2, HalfInt m3) {
    validate_jm(j1, m1, "three_jm");
    validate_jm(j2, m2, "three_jm");
    validate_jm(j3, m3, "three_jm");
    return three_jm_t(j1.twice(), j2.twice(), j3.twice(),
                      m1.twice(), m2.twice(), m3.twice());
}

SignedSqrtRational six_j(HalfInt j1, HalfInt j2, HalfInt j3,
                         HalfInt j4, HalfInt j5, HalfInt j6) {
    return six_j_t(j1.twice(), j2.twice(), j3.twice(),
                   j4.twice(), j5.twice(), j6.twice());
}

ExactCheck identity_orthogonality_mm(HalfInt j, HalfInt jp, HalfInt k,
                                     HalfInt q, HalfInt l, HalfInt p) {
    const int tj = j.twice(), tjp = jp.twice(), tk = k.twice();
    const int tq = q.twice(), tl = l.twice(), tp = p.twice();
    ExactSum sum;
    // Magnetic labels of the wrong parity index no state and contribute no
    // term; the matching right-hand sides carry the same convention.
    if (tq == tp && same_parity(k, q) && same_parity(l, p)) {
        for (int tm = -tj; tm <= tj; tm += 2) {
            const int tmp = -tm - tq;
            if (std::abs(tmp) > tjp || ((tmp ^ tjp) & 1) != 0) continue;
            sum.add(three_jm_t(tj, tjp, tk, tm, tmp, tq) *
                    three_jm_t(tj, tjp, tl, tm, tmp, tp));
        }
    }
    SignedSqrtRational rhs;
    if (tk == tl && tq == tp && std::abs(tq) <= tk && same_parity(k, q) &&
        tri_ok(tj, tjp, tk))
        rhs = SignedSqrtRational::from_rational(Rational(1, tk + 1));
    return finish_check(sum, rhs);
}

ExactCheck identity_orthogonality_kq(HalfInt j, HalfInt jp, HalfInt m,
                                     HalfInt mp, HalfInt M, HalfInt Mp) {
    const int tj = j.twice(), tjp = jp.twice();
    const int tm = m.twice(), tmp = mp.twice(), tM = M.twice(), tMp = Mp.twice();
    ExactSum sum;
    const bool labels_ok = same_parity(j, m) && same_parity(jp, mp) &&
                           same_parity(j, M) && same_parity(jp, Mp);
    if (labels_ok && tm + tmp == tM + tMp) {
        const int tq = -(tm + tmp);
        for (int tk = std::abs(tj - tjp); tk <= tj + tjp; tk += 2) {
            if (std::abs(tq) > tk) continue;
            SignedSqrtRational v = three_jm_t(tj, tjp, tk, tm, tmp, tq) *
                                   three_jm_t(tj, tjp, tk, tM, tMp, tq);
            v *= Rational(tk + 1);
            sum.add(v);
        }
    }
    SignedSqrtRational rhs;
    if (tm == tM && tmp == tMp && valid_jm(j, m) && valid_jm(jp, mp))
        rhs = SignedSqrtRational::from_rational(Rational(1));
    return finish_check(sum, rhs);
}

ExactCheck identity_barycenter(HalfInt j, HalfInt k, HalfInt q) {
    const int tj = j.twice(), tk = k.twice(), tq = q.twice();
    ExactSum sum;
    if (tq == 0) {
        for (int tm = -tj; tm <= tj; tm += 2) {
            SignedSqrtRational v = three_jm_t(tj, tk, tj, -tm, 0, tm);
            if (parity_sign((tj - tm) / 2) < 0) v = -v;
            sum.add(v);
        }
    }
    SignedSqrtRational rhs;
    if (tk == 0 && tq == 0 && tj >= 0)
        rhs = SignedSqrtRational::from_coeff_radicand(Rational(1), Rational(tj + 1));
    return finish_check(sum, rhs);
}

ExactCheck identity_contraction(HalfInt j, HalfInt k, HalfInt l, HalfInt K,
                                HalfInt q, HalfInt p, HalfInt Q) {
    const int tj = j.twice(), tk = k.twice(), tl = l.twice(), tK = K.twice();
    const int tq = q.twice(), tp = p.twice(), tQ = Q.twice();
    ExactSum sum;
    const bool labels_ok = same_parity(k, q) && same_parity(l, p) && same_parity(K, Q);
    if (labels_ok && tq + tp == tQ) {
        for (int tm = -tj; tm <= tj; tm += 2) {
            const int tM = tm - tq;
            const int tmp = tm - tQ;
            if (std::abs(tM) > tj || std::abs(tmp) > tj) continue;
            if (((tM ^ tj) & 1) != 0 || ((tmp ^ tj) & 1) != 0) continue;
            SignedSqrtRational v = three_jm_t(tj, tk, tj, -tm, tq, tM) *
                                   three_jm_t(tj, tl, tj, -tM, tp, tmp) *
                                   three_jm_t(tj, tK, tj, -tm, tQ, tmp);
            if (parity_sign((tj - tM) / 2) < 0) v = -v;
            sum.add(v);
        }
    }
    SignedSqrtRational rhs;
    if (labels_ok) {
        rhs = three_jm_t(tk, tl, tK, -tq, -tp, tQ) * six_j_t(tk, tl, tK, tj, tj, tj);
        const int e2 = 2 * tj - tQ;
        if (e2 % 2 == 0 && parity_sign(e2 / 2) < 0) rhs = -rhs;
    }
    return finish_check(sum, rhs);
}

SuiteResult run_identity_suite(int max_two_j, int threads) {
    // Jobs: (a, b) pairs feed the two orthogonality identities, (a, -1)
    // feeds barycenter and contraction for that a.
    std::vector<std::pair<int, int>> jobs;
    for (int a = 0; a <= max_two_j; ++a) {
        jobs.emplace_back(a, -1);
        for (int b = 0; b <= max_two_j; ++b) jobs.emplace_back(a, b);
    }
    // Heaviest jobs first, so a threaded run drains them early.
    std::sort(jobs.begin(), jobs.end(), [](const auto& x, const auto& y) {
        auto weight = [](const std::pair<int, int>& jb) {
            return jb.second < 0 ? 2.0 * jb.first * jb.first * jb.first
                                 : 1.0 * jb.first * jb.second;
        };
        return weight(x) > weight(y);
    });

    auto run_job = [](const std::pair<int, int>& jb, SuiteAccum& acc) {
        if (jb.second < 0)
            run_single_job(jb.first, acc);
        else
            run_pair_job(jb.first, jb.second, acc);
    };

    if (threads <= 1 || jobs.size() <= 1) {
        SuiteAccum acc;
        for (const auto& jb : jobs) run_job(jb, acc);
        return acc.r;
    }

    const int nthreads = std::min<int>(threads, static_cast<int>(jobs.size()));
    std::vector<SuiteAccum> accs(nthreads);
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&, t] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= jobs.size()) break;
                run_job(jobs[i], accs[t]);
            }
        });
    for (auto& th : pool) th.join();

    SuiteResult merged;
    for (const auto& acc : accs) {
        auto add = [](SuiteCounts& into, const SuiteCounts& from) {
            into.checked += from.checked;
            into.computed += from.computed;
            into.failed += from.failed;
        };
        add(merged.orthogonality_mm, acc.r.orthogonality_mm);
        add(merged.orthogonality_kq, acc.r.orthogonality_kq);
        add(merged.barycenter, acc.r.barycenter);
        add(merged.contraction, acc.r.contraction);
        merged.all_exact = merged.all_exact && acc.r.all_exact;
        if (merged.first_failure.empty()) merged.first_failure = acc.r.first_failure;
    }
    return merged;
}

}  // namespace rf::wigner
