#pragma once

#include "rf/coefficients.hpp"
#include "rf/report.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace rf::frame {

// Default tolerances: exact constructions limited by rounding, results of an
// iterative search, and entrywise matrix identities.
inline constexpr double kNumericTol = 1e-10;
inline constexpr double kSearchTol = 1e-8;
inline constexpr double kExactTol = 1e-12;

// Expansion of a d x d operator over the unit-tensor basis,
// c_kq = (2k+1) Tr(u(k,q)^H A), so that A = sum_kq c_kq u(k,q).
// Throws std::invalid_argument on a dimension mismatch.
TensorCoefficients expand(const Eigen::MatrixXcd& op, int two_j, std::string label = {});
Eigen::MatrixXcd reconstruct(const TensorCoefficients& coeffs);

// Flattening into C^{(2j+1)^2}: v[k^2+k+q] = c_kq / sqrt(2k+1).  Bijective
// with devectorize; labels carry over.
FrameVector vectorize(const TensorCoefficients& coeffs);
TensorCoefficients devectorize(const FrameVector& v);

struct GramReport {
    Eigen::MatrixXcd matrix;         // pairwise products v(x).v(y), Hermitian
    std::string target;              // name of the expected structure
    double max_deviation = 0.0;      // entrywise distance from the expected matrix
    Eigen::VectorXd eigen_spectrum;  // eigenvalues, descending
};

// Expected Gram structures.  A d^2-member equiangular family has
// (d [x=y] + 1)/(d+1); a full set of d+1 unbiased bases, ordered basis-major,
// has identity blocks on the diagonal and constant 1/d across bases.
Eigen::MatrixXd sic_gram_target(int d);
Eigen::MatrixXd mub_gram_target(int d);

// Throws std::invalid_argument on an empty family, mixed two_j, or a target
// of the wrong size.
GramReport gram(const std::vector<FrameVector>& vectors, const Eigen::MatrixXd& target,
                std::string target_name);

// c(0,0) = 1/sqrt(2j+1), the component every unit-trace operator shares.
CheckReport check_first_component(const TensorCoefficients& coeffs,
                                  double tol = kNumericTol);

// conj(c(k,q)) = (-1)^q c(k,-q), satisfied exactly by Hermitian operators.
CheckReport check_conjugation(const TensorCoefficients& coeffs, double tol = kNumericTol);

// sum_k 1/(2k+1) sum_q conj(c_kq(x)) c_kq(y) against an expected real value;
// the sum is invariant under global rotations of the spin space.
CheckReport check_rotational_invariance(const TensorCoefficients& x,
                                        const TensorCoefficients& y, double expected,
                                        double tol = kNumericTol);

// The quadratic system satisfied by rank-one projector coefficients:
//   c(K,Q)/(2K+1) = (-1)^{2j-Q} sum_{klqp} (k l K; -q -p Q) {k l K; j j j}
//                   c(k,q) c(l,p)
// for every (K,Q), one report entry each, plus the K=0 corollary |v|^2 = 1.
CheckReport check_quadratic_system(const TensorCoefficients& coeffs,
                                   double tol = kNumericTol);

// sum_x sum_kq c_kq(x) (j k j; -m q m') = (-1)^{j-m} s delta_{m,m'} where s
// is the scalar in sum_x P_x = s I: a d^2-member equiangular family has
// s = d, a full unbiased family has s = d+1.
CheckReport check_sum_rule(const std::vector<TensorCoefficients>& family,
                           double identity_multiple, double tol = kNumericTol);

struct RankReport {
    int rank = 0;
    int required = 0;
    bool complete = false;
    Eigen::VectorXd singular_values;  // descending
};

// Numerical rank of the n x (2j+1)^2 matrix stacking the vectors row-wise;
// the family fixes any density matrix from its outcome probabilities iff the
// rank is the full (2j+1)^2.
RankReport check_informational_completeness(const std::vector<FrameVector>& vectors);

}  // namespace rf::frame
