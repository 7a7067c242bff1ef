#pragma once

#include "rf/coefficients.hpp"
#include "rf/frame.hpp"
#include "rf/report.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rf::mub {

// A set of orthonormal bases of C^d that are pairwise unbiased:
// |<a,alpha|b,beta>|^2 = 1/d whenever a != b.  bases[a] is d x d with
// columns |a,alpha>, alpha ascending, rows in the magnetic order m = j..-j
// shared with the tensor matrices.  For sets built here the last basis
// (a = d) is the computational one, |d,alpha> = e_{d-1-alpha} (m = alpha-j),
// and all phases are powers of omega = exp(2 pi i/d) with exactly tracked
// rational exponents.
struct MubSet {
    int two_j = 0;
    std::vector<Eigen::MatrixXcd> bases;

    int d() const { return two_j + 1; }
    int basis_count() const { return static_cast<int>(bases.size()); }
    Eigen::VectorXcd vector(int a, int alpha) const { return bases[a].col(alpha); }
};

// exp(i pi t2/den) for integer t2, i.e. omega^{t2/2} with omega the primitive
// den-th root of unity.  Exponents are reduced mod 2 den first; quarter turns
// come out exact, so the half-integer exponents arising at den = 2 give +-i.
Complex unit_phase(long t2, int den);

// Deterministic trial division, intended for the desk scale n <= 10^4.
bool is_prime(int n);

// The full set of d+1 unbiased bases for prime d: basis a < d has entries
// (1/sqrt d) omega^{(j+m)(j-m+1)a/2 + (j+m)alpha} at row m, and basis a = d
// is computational.  Throws std::invalid_argument unless d is prime.
MubSet build_prime_mubs(int d);

// Orthonormality of every basis, unbiasedness of every basis pair, and the
// identity decomposition (1/(d+1)) sum |a,alpha><a,alpha| = I.  One report
// entry per basis, per basis pair, and for the decomposition, each carrying
// its worst offender.
CheckReport verify_mubs(const MubSet& set, double tol = frame::kNumericTol);

// Expansion coefficients d_kq(a,alpha) of every projector |a,alpha><a,alpha|
// over the unit tensors, labelled "a=.. alpha=..", basis-major order.
std::vector<TensorCoefficients> mub_coefficients(const MubSet& set);

// Single coefficient straight from the construction phases:
//   d_kq(a,alpha) = ((2k+1)/d) sum_m omega^{theta} (-1)^{j-m} (j k j; -m q m-q)
// with theta = (m-m')[(1-m-m')a/2 + alpha], m' = m-q, and the computational
// basis a = d reducing to delta_{q,0}(2k+1)(-1)^{j-m}(j k j; -m 0 m).
// Throws std::invalid_argument unless d is prime and indices are in range.
Complex closed_form_dkq(int d, int a, int alpha, int k, int q);

// Projector-expansion route against closed_form_dkq at every (a,alpha,k,q).
// Meaningful for sets produced by build_prime_mubs.
CheckReport check_closed_form(const MubSet& set, double tol = frame::kExactTol);

// The five structural identities of the coefficient family: first component,
// conjugation, rotational invariance over all member pairs, the quadratic
// system per member, and the sum rule with identity multiple d+1.
CheckReport coefficient_battery(const MubSet& set, double tol = frame::kNumericTol);

}  // namespace rf::mub
