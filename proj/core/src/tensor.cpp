#include "rf/tensor.hpp"

#include "rf/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace rf::tensor {

namespace {

void validate_kq(int two_j, int k, int q) {
    if (two_j < 0) throw std::invalid_argument("tensor: two_j must be >= 0");
    if (k < 0 || k > two_j || std::abs(q) > k) {
        std::ostringstream os;
        os << "tensor: invalid (k, q) = (" << k << ", " << q << ") for two_j = " << two_j;
        throw std::invalid_argument(os.str());
    }
}

double max_entry_norm(const Eigen::MatrixXcd& m) {
    return m.cwiseAbs().maxCoeff();
}

std::string kq_name(int k, int q) {
    std::ostringstream os;
    os << "u(" << k << "," << q << ")";
    return os.str();
}

}  // namespace

UnitTensor unit_tensor(int two_j, int k, int q) {
    validate_kq(two_j, k, q);
    const int d = two_j + 1;
    UnitTensor u{two_j, k, q, Eigen::MatrixXcd::Zero(d, d)};
    const HalfInt j = HalfInt::from_twice(two_j);
    const HalfInt hk = HalfInt::whole(k);
    const HalfInt hq = HalfInt::whole(q);
    for (int row = 0; row < d; ++row) {
        const int tm = two_j - 2 * row;
        const int tmp = tm - 2 * q;
        if (std::abs(tmp) > two_j) continue;
        const auto sym = wigner::three_jm(j, hk, j, HalfInt::from_twice(-tm), hq,
                                          HalfInt::from_twice(tmp));
        const double val = parity_sign(row) * sym.to_double();
        u.matrix(row, row_of(two_j, tmp)) = val;
    }
    return u;
}

const std::vector<UnitTensor>& tensor_basis(int two_j) {
    if (two_j < 0) throw std::invalid_argument("tensor: two_j must be >= 0");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<std::vector<UnitTensor>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[two_j];
    if (!slot) {
        auto basis = std::make_unique<std::vector<UnitTensor>>();
        basis->reserve((two_j + 1) * (two_j + 1));
        for (int k = 0; k <= two_j; ++k)
            for (int q = -k; q <= k; ++q) basis->push_back(unit_tensor(two_j, k, q));
        slot = std::move(basis);
    }
    return *slot;
}

std::complex<double> trace_pairing(const UnitTensor& a, const UnitTensor& b) {
    return (a.matrix.adjoint() * b.matrix).trace();
}

CheckReport check_hermitian_conjugation(int two_j, int k, int q) {
    validate_kq(two_j, k, q);
    const auto& basis = tensor_basis(two_j);
    const auto& u = basis[tensor_index(k, q)];
    const auto& v = basis[tensor_index(k, -q)];
    const double resid =
        max_entry_norm(u.matrix.adjoint() - parity_sign(q) * v.matrix);
    CheckReport report;
    report.add(kq_name(k, q) + " adjoint", "u(k,q)^H = (-1)^q u(k,-q)", resid, 1e-12);
    return report;
}

CheckReport check_hermitian_conjugation(int two_j) {
    CheckReport report;
    for (int k = 0; k <= two_j; ++k)
        for (int q = -k; q <= k; ++q)
            report.merge(check_hermitian_conjugation(two_j, k, q));
    return report;
}

CheckReport check_trace_orthogonality(int two_j) {
    const auto& basis = tensor_basis(two_j);
    CheckReport report;
    for (int k = 0; k <= two_j; ++k) {
        for (int l = 0; l <= two_j; ++l) {
            double worst = 0.0;
            int worst_q = 0, worst_p = 0;
            for (int q = -k; q <= k; ++q) {
                for (int p = -l; p <= l; ++p) {
                    const auto tr =
                        trace_pairing(basis[tensor_index(k, q)], basis[tensor_index(l, p)]);
                    const double want = (k == l && q == p) ? 1.0 / (2 * k + 1) : 0.0;
                    const double dev = std::abs(tr - std::complex<double>(want, 0.0));
                    if (dev > worst) {
                        worst = dev;
                        worst_q = q;
                        worst_p = p;
                    }
                }
            }
            std::ostringstream os;
            os << "worst at q=" << worst_q << " p=" << worst_p;
            report.add("trace block k=" + std::to_string(k) + " l=" + std::to_string(l),
                       "Tr(u(k,q)^H u(l,p)) = [k=l][q=p]/(2k+1)", worst, 1e-12, os.str());
        }
    }
    return report;
}

int CouplingTable::triple_index(int k, int l, int K) const {
    const int n = two_j_ + 1;
    return (k * n + l) * n + K;
}

CouplingTable::CouplingTable(int two_j) : two_j_(two_j) {
    if (two_j < 0) throw std::invalid_argument("tensor: two_j must be >= 0");
    dense_ = two_j <= kDenseLimit;
    if (!dense_) return;
    const int n = two_j + 1;
    const HalfInt j = HalfInt::from_twice(two_j);
    block_.assign(static_cast<std::size_t>(n) * n * n, -1);
    six_.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int k = 0; k <= two_j; ++k) {
        const HalfInt hk = HalfInt::whole(k);
        for (int l = 0; l <= two_j; ++l) {
            const HalfInt hl = HalfInt::whole(l);
            const int klo = std::abs(k - l);
            const int khi = std::min(k + l, two_j);
            for (int K = klo; K <= khi; ++K) {
                const HalfInt hK = HalfInt::whole(K);
                const double sixv = wigner::six_j(hk, hl, hK, j, j, j).to_double();
                const int ti = triple_index(k, l, K);
                six_[ti] = sixv;
                block_[ti] = static_cast<long>(values_.size());
                for (int q = -k; q <= k; ++q) {
                    for (int p = -l; p <= l; ++p) {
                        const int Q = q + p;
                        double v = 0.0;
                        if (std::abs(Q) <= K) {
                            v = wigner::three_jm(hk, hl, hK, HalfInt::whole(-q),
                                                 HalfInt::whole(-p), HalfInt::whole(Q))
                                    .to_double() *
                                sixv;
                        }
                        values_.push_back(v);
                    }
                }
            }
        }
    }
}

double CouplingTable::six(int k, int l, int K) const {
    if (k < 0 || l < 0 || K < 0 || k > two_j_ || l > two_j_ || K > two_j_) return 0.0;
    if (dense_) return six_[triple_index(k, l, K)];
    const HalfInt j = HalfInt::from_twice(two_j_);
    return wigner::six_j(HalfInt::whole(k), HalfInt::whole(l), HalfInt::whole(K), j, j, j)
        .to_double();
}

double CouplingTable::kernel(int k, int q, int l, int p, int K) const {
    if (k < 0 || l < 0 || K < 0 || k > two_j_ || l > two_j_ || K > two_j_) return 0.0;
    if (std::abs(q) > k || std::abs(p) > l || std::abs(q + p) > K) return 0.0;
    if (K < std::abs(k - l) || K > k + l) return 0.0;
    if (dense_) {
        const long off = block_[triple_index(k, l, K)];
        if (off < 0) return 0.0;
        return values_[static_cast<std::size_t>(off) + (q + k) * (2 * l + 1) + (p + l)];
    }
    const HalfInt j = HalfInt::from_twice(two_j_);
    const auto sym = wigner::three_jm(HalfInt::whole(k), HalfInt::whole(l), HalfInt::whole(K),
                                      HalfInt::whole(-q), HalfInt::whole(-p),
                                      HalfInt::whole(q + p));
    return sym.to_double() * six(k, l, K);
}

const CouplingTable& coupling_table(int two_j) {
    if (two_j < 0) throw std::invalid_argument("tensor: two_j must be >= 0");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<CouplingTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[two_j];
    if (!slot) slot = std::make_unique<CouplingTable>(two_j);
    return *slot;
}

TensorCoefficients couple(int two_j, int k, int q, int l, int p) {
    validate_kq(two_j, k, q);
    validate_kq(two_j, l, p);
    const auto& table = coupling_table(two_j);
    const int Q = q + p;
    TensorCoefficients out(two_j, kq_name(k, q) + kq_name(l, p));
    const int klo = std::max(std::abs(k - l), std::abs(Q));
    const int khi = std::min(k + l, two_j);
    for (int K = klo; K <= khi; ++K) {
        const double c =
            parity_sign(two_j - Q) * (2 * K + 1) * table.kernel(k, q, l, p, K);
        out.set(K, Q, c);
    }
    return out;
}

CheckReport check_coupling(int two_j) {
    const auto& basis = tensor_basis(two_j);
    const int d = two_j + 1;
    double worst = 0.0;
    std::string worst_pair;
    long long pairs = 0;
    for (int k = 0; k <= two_j; ++k) {
        for (int q = -k; q <= k; ++q) {
            const auto& u = basis[tensor_index(k, q)];
            for (int l = 0; l <= two_j; ++l) {
                for (int p = -l; p <= l; ++p) {
                    const auto& v = basis[tensor_index(l, p)];
                    Eigen::MatrixXcd resid = u.matrix * v.matrix;
                    const auto coeffs = couple(two_j, k, q, l, p);
                    const int Q = q + p;
                    if (std::abs(Q) <= two_j) {
                        const int klo = std::max(std::abs(k - l), std::abs(Q));
                        const int khi = std::min(k + l, two_j);
                        for (int K = klo; K <= khi; ++K)
                            resid -= coeffs.at(K, Q) * basis[tensor_index(K, Q)].matrix;
                    }
                    const double dev = max_entry_norm(resid);
                    ++pairs;
                    if (dev > worst) {
                        worst = dev;
                        worst_pair = kq_name(k, q) + kq_name(l, p);
                    }
                }
            }
        }
    }
    CheckReport report;
    std::ostringstream os;
    os << pairs << " products, worst " << worst_pair;
    report.add("product expansion d=" + std::to_string(d),
               "u(k,q) u(l,p) = sum_K (-1)^{2j-Q} (2K+1) (3jm)(6j) u(K,Q)", worst, 1e-12,
               os.str());
    return report;
}

CheckReport check_lie_closure(int two_j) {
    const auto& basis = tensor_basis(two_j);
    const int d = two_j + 1;
    const int n = d * d;
    double worst = 0.0;
    std::string worst_pair;
    for (int k = 0; k <= two_j; ++k) {
        for (int q = -k; q <= k; ++q) {
            const auto& u = basis[tensor_index(k, q)];
            for (int l = 0; l <= two_j; ++l) {
                for (int p = -l; p <= l; ++p) {
                    const auto& v = basis[tensor_index(l, p)];
                    Eigen::MatrixXcd resid = u.matrix * v.matrix - v.matrix * u.matrix;
                    const int Q = q + p;
                    if (std::abs(Q) <= two_j) {
                        const auto ab = couple(two_j, k, q, l, p);
                        const auto ba = couple(two_j, l, p, k, q);
                        const int klo = std::max(std::abs(k - l), std::abs(Q));
                        const int khi = std::min(k + l, two_j);
                        for (int K = klo; K <= khi; ++K)
                            resid -= (ab.at(K, Q) - ba.at(K, Q)) *
                                     basis[tensor_index(K, Q)].matrix;
                    }
                    const double dev = max_entry_norm(resid);
                    if (dev > worst) {
                        worst = dev;
                        worst_pair = "[" + kq_name(k, q) + "," + kq_name(l, p) + "]";
                    }
                }
            }
        }
    }
    CheckReport report;
    report.add("commutator closure d=" + std::to_string(d),
               "[u(k,q), u(l,p)] expands in the tensor basis", worst, 1e-12, worst_pair);

    Eigen::MatrixXcd gram(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) gram(a, b) = trace_pairing(basis[a], basis[b]);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram);
    const auto& sv = svd.singularValues();
    int rank = 0;
    const double cutoff = sv.size() ? sv(0) * 1e-10 : 0.0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    report.add("basis rank d=" + std::to_string(d),
               "trace Gram of the (2j+1)^2 tensors has full rank",
               static_cast<double>(n - rank), 0.0, "rank " + std::to_string(rank));
    return report;
}

}  // namespace rf::tensor
