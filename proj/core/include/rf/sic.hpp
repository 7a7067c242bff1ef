#pragma once

#include "rf/coefficients.hpp"
#include "rf/frame.hpp"
#include "rf/report.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace rf::sic {

// Eigenvalues of the Gram matrix of a converged family are amplified member
// deviations (by roughly the family size), hence the looser pinned tolerance.
inline constexpr double kSpectrumTol = 1e-6;

// A d^2-member equiangular candidate.  states[x] are unit vectors in C^d;
// when covariant is set they are the displacement orbit of fiducial, ordered
// x = a d + b for X^a Z^b with X the cyclic shift and Z the clock
// diag(1, omega, .., omega^{d-1}), omega = exp(2 pi i/d).  residual is the
// worst deviation of |<x|y>|^2 from 1/(d+1) over distinct pairs, recomputed
// from the states (never a stale objective value).
struct SicCandidate {
    int two_j = 0;
    std::vector<Eigen::VectorXcd> states;
    Eigen::VectorXcd fiducial;
    bool covariant = false;
    bool converged = false;
    double residual = 0.0;

    int d() const { return two_j + 1; }
};

struct SearchConfig {
    int d = 2;
    int restarts = 50;
    int max_iterations = 20000;
    double tolerance = 1e-8;
    std::uint64_t seed = 42;
    bool covariant = true;
};

// The d^2 states X^a Z^b f ordered x = a d + b.  Throws std::invalid_argument
// unless f has unit norm to 1e-12.
std::vector<Eigen::VectorXcd> wh_orbit(const Eigen::VectorXcd& fiducial);

// Unit norms, pairwise overlaps against (d [x=y] + 1)/(d+1), the identity
// decomposition (1/d) sum P_x = I, and the informational-completeness rank.
CheckReport verify_sic(const SicCandidate& cand, double tol = frame::kSearchTol);

// Minimizes sum_{x<y} (|<x|y>|^2 - 1/(d+1))^2 by adaptive-step gradient
// descent with deterministic random restarts (restart r uses seed + r);
// each restart hands over to a damped Gauss-Newton polish once close, since
// plain descent crawls along nearly flat valleys (d = 3 has a continuous
// family of solutions).  Stops at the first restart whose recomputed
// residual is below tolerance, otherwise returns the best restart (ties to
// the lowest index) flagged not converged.  covariant = false optimizes all
// d^2 states independently instead of a fiducial orbit.
SicCandidate search_fiducial(const SearchConfig& config);

// Expansion coefficients c_kq(x) of every projector |x><x|, labelled "x=..".
std::vector<TensorCoefficients> sic_coefficients(const SicCandidate& cand);

// First component, conjugation, rotational invariance over all pairs, the
// quadratic system per member, the sum rule with identity multiple d, and
// the Gram spectrum {d once, d/(d+1) with multiplicity d^2-1}.
CheckReport coefficient_battery(const SicCandidate& cand, double tol = frame::kSearchTol);

// The overlap table |<x|y>|^2 computed from the states against the Hermitian
// products v(x).v(y) of the vectorized coefficients, pair by pair: the two
// routes to the same geometry must agree.
CheckReport check_state_vector_equivalence(const SicCandidate& cand,
                                           double tol = frame::kExactTol);

}  // namespace rf::sic
