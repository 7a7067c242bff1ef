#pragma once

#include "rf/coefficients.hpp"
#include "rf/report.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace rf::tensor {

// Irreducible unit tensor u^(k)_q acting on the (two_j+1)-dimensional spin
// space.  Rows and columns are labelled by the magnetic number m in
// decreasing order m = j, j-1, ..., -j, so row i carries 2m = two_j - 2i.
// Entry (m, m') is (-1)^{j-m} (j k j; -m q m'), nonzero only on the
// diagonal m = m' + q.  Every entry is real; the complex scalar type keeps
// products and mixed expressions in a single representation.
struct UnitTensor {
    int two_j = 0;
    int k = 0;
    int q = 0;
    Eigen::MatrixXcd matrix;
};

constexpr int row_of(int two_j, int two_m) { return (two_j - two_m) / 2; }

// Throws std::invalid_argument unless 0 <= k <= two_j and |q| <= k.
UnitTensor unit_tensor(int two_j, int k, int q);

// All (two_j+1)^2 unit tensors for this space, indexed by tensor_index(k, q).
// Built on first use and cached; the reference stays valid for the process
// lifetime.  Thread safe.
const std::vector<UnitTensor>& tensor_basis(int two_j);

// Hilbert-Schmidt pairing Tr(a^H b).
std::complex<double> trace_pairing(const UnitTensor& a, const UnitTensor& b);

// Adjoint relation u(k,q)^H = (-1)^q u(k,-q), one report entry per tensor.
CheckReport check_hermitian_conjugation(int two_j, int k, int q);
CheckReport check_hermitian_conjugation(int two_j);

// Tr(u(k,q)^H u(l,p)) = [k=l][q=p] tri(j,j,k)/(2k+1) over all index pairs,
// aggregated into one report entry per (k,l) block.
CheckReport check_trace_orthogonality(int two_j);

// Scalar factor (k l K; -q -p q+p) {k l K; j j j} shared by the product
// expansion and the quadratic coefficient system.  The (2K+1) weight and the
// (-1)^{2j-Q} phase are applied by callers.  Tables up to kDenseLimit are
// precomputed densely from exact symbol values; larger spaces fall back to
// exact evaluation per call.
class CouplingTable {
public:
    static constexpr int kDenseLimit = 20;

    explicit CouplingTable(int two_j);

    int two_j() const { return two_j_; }

    double kernel(int k, int q, int l, int p, int K) const;

    // {k l K; j j j}
    double six(int k, int l, int K) const;

private:
    int triple_index(int k, int l, int K) const;

    int two_j_ = 0;
    bool dense_ = false;
    std::vector<long> block_;
    std::vector<double> values_;
    std::vector<double> six_;
};

// Per-two_j cached table, same lifetime guarantee as tensor_basis().
const CouplingTable& coupling_table(int two_j);

// Coefficients of the product u(k,q) u(l,p) in the unit-tensor basis:
// coefficient at (K, q+p) is (-1)^{2j-Q} (2K+1) (k l K; -q -p Q) {k l K; j j j}.
TensorCoefficients couple(int two_j, int k, int q, int l, int p);

// Every product u(k,q) u(l,p) reconstructed from couple() against the direct
// matrix product, aggregated max-entry residual.
CheckReport check_coupling(int two_j);

// (a) every commutator [u(k,q), u(l,p)] expands in the basis with zero
// residual, (b) the (two_j+1)^2 tensors are linearly independent (full-rank
// trace Gram).
CheckReport check_lie_closure(int two_j);

} // namespace rf::tensor
