#include "rf/frame.hpp"

#include "rf/half_int.hpp"
#include "rf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace rf::frame {

namespace {

int common_two_j(const std::vector<FrameVector>& vectors, const char* caller) {
    if (vectors.empty())
        throw std::invalid_argument(std::string(caller) + ": empty family");
    const int two_j = vectors.front().two_j();
    for (const auto& v : vectors)
        if (v.two_j() != two_j)
            throw std::invalid_argument(std::string(caller) + ": mixed two_j in family");
    return two_j;
}

}  // namespace

TensorCoefficients expand(const Eigen::MatrixXcd& op, int two_j, std::string label) {
    const int d = two_j + 1;
    if (op.rows() != d || op.cols() != d)
        throw std::invalid_argument("expand: operator dimension does not match two_j");
    const auto& basis = tensor::tensor_basis(two_j);
    TensorCoefficients out(two_j, std::move(label));
    for (const auto& u : basis) {
        Complex tr = 0.0;
        for (int row = 0; row < d; ++row) {
            const int col = row + u.q;
            if (col < 0 || col >= d) continue;
            tr += std::conj(u.matrix(row, col)) * op(row, col);
        }
        out.set(u.k, u.q, static_cast<double>(2 * u.k + 1) * tr);
    }
    return out;
}

Eigen::MatrixXcd reconstruct(const TensorCoefficients& coeffs) {
    const int two_j = coeffs.two_j();
    const int d = two_j + 1;
    const auto& basis = tensor::tensor_basis(two_j);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& u : basis) {
        const Complex c = coeffs.at(u.k, u.q);
        if (c == Complex(0.0)) continue;
        for (int row = 0; row < d; ++row) {
            const int col = row + u.q;
            if (col < 0 || col >= d) continue;
            out(row, col) += c * u.matrix(row, col);
        }
    }
    return out;
}

FrameVector vectorize(const TensorCoefficients& coeffs) {
    const int two_j = coeffs.two_j();
    FrameVector v(two_j, coeffs.label());
    for (int k = 0; k <= two_j; ++k) {
        const double w = 1.0 / std::sqrt(static_cast<double>(2 * k + 1));
        for (int q = -k; q <= k; ++q) v[tensor_index(k, q)] = w * coeffs.at(k, q);
    }
    return v;
}

TensorCoefficients devectorize(const FrameVector& v) {
    const int two_j = v.two_j();
    TensorCoefficients coeffs(two_j, v.label());
    for (int k = 0; k <= two_j; ++k) {
        const double w = std::sqrt(static_cast<double>(2 * k + 1));
        for (int q = -k; q <= k; ++q) coeffs.set(k, q, w * v[tensor_index(k, q)]);
    }
    return coeffs;
}

Eigen::MatrixXd sic_gram_target(int d) {
    if (d < 1) throw std::invalid_argument("sic_gram_target: d must be >= 1");
    const int n = d * d;
    Eigen::MatrixXd target = Eigen::MatrixXd::Constant(n, n, 1.0 / (d + 1));
    target.diagonal().setOnes();
    return target;
}

Eigen::MatrixXd mub_gram_target(int d) {
    if (d < 1) throw std::invalid_argument("mub_gram_target: d must be >= 1");
    const int n = d * (d + 1);
    Eigen::MatrixXd target = Eigen::MatrixXd::Constant(n, n, 1.0 / d);
    for (int a = 0; a <= d; ++a) {
        auto block = target.block(a * d, a * d, d, d);
        block.setZero();
        block.diagonal().setOnes();
    }
    return target;
}

GramReport gram(const std::vector<FrameVector>& vectors, const Eigen::MatrixXd& target,
                std::string target_name) {
    const int n = static_cast<int>(vectors.size());
    common_two_j(vectors, "gram");
    if (target.rows() != n || target.cols() != n)
        throw std::invalid_argument("gram: target size does not match family size");
    GramReport report;
    report.target = std::move(target_name);
    report.matrix.resize(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) report.matrix(x, y) = vectors[x].dot(vectors[y]);
    report.max_deviation =
        (report.matrix - target.cast<Complex>()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(report.matrix);
    report.eigen_spectrum = solver.eigenvalues().reverse();
    return report;
}

CheckReport check_first_component(const TensorCoefficients& coeffs, double tol) {
    const double want = 1.0 / std::sqrt(static_cast<double>(coeffs.two_j() + 1));
    const double resid = std::abs(coeffs.at(0, 0) - Complex(want, 0.0));
    CheckReport report;
    report.add("first component", "c(0,0) = 1/sqrt(2j+1)", resid, tol, coeffs.label());
    return report;
}

CheckReport check_conjugation(const TensorCoefficients& coeffs, double tol) {
    const int two_j = coeffs.two_j();
    double worst = 0.0;
    int worst_k = 0, worst_q = 0;
    for (int k = 0; k <= two_j; ++k) {
        for (int q = -k; q <= k; ++q) {
            const double dev = std::abs(std::conj(coeffs.at(k, q)) -
                                        static_cast<double>(parity_sign(q)) *
                                            coeffs.at(k, -q));
            if (dev > worst) {
                worst = dev;
                worst_k = k;
                worst_q = q;
            }
        }
    }
    CheckReport report;
    std::ostringstream os;
    os << coeffs.label() << " worst at (" << worst_k << "," << worst_q << ")";
    report.add("conjugation", "conj(c(k,q)) = (-1)^q c(k,-q)", worst, tol, os.str());
    return report;
}

CheckReport check_rotational_invariance(const TensorCoefficients& x,
                                        const TensorCoefficients& y, double expected,
                                        double tol) {
    if (x.two_j() != y.two_j())
        throw std::invalid_argument("check_rotational_invariance: mixed two_j");
    const int two_j = x.two_j();
    Complex sum = 0.0;
    for (int k = 0; k <= two_j; ++k) {
        Complex inner = 0.0;
        for (int q = -k; q <= k; ++q) inner += std::conj(x.at(k, q)) * y.at(k, q);
        sum += inner / static_cast<double>(2 * k + 1);
    }
    CheckReport report;
    std::ostringstream os;
    os << x.label() << " . " << y.label() << " = " << sum.real();
    if (sum.imag() != 0.0) os << (sum.imag() < 0 ? " - " : " + ") << std::abs(sum.imag()) << "i";
    report.add("rotational invariance",
               "sum_k 1/(2k+1) sum_q conj(c_kq) c'_kq matches the pair class",
               std::abs(sum - Complex(expected, 0.0)), tol, os.str());
    return report;
}

CheckReport check_quadratic_system(const TensorCoefficients& coeffs, double tol) {
    const int two_j = coeffs.two_j();
    const auto& table = tensor::coupling_table(two_j);
    CheckReport report;
    for (int K = 0; K <= two_j; ++K) {
        for (int Q = -K; Q <= K; ++Q) {
            Complex rhs = 0.0;
            for (int k = 0; k <= two_j; ++k) {
                const int llo = std::abs(k - K);
                const int lhi = std::min(k + K, two_j);
                for (int l = llo; l <= lhi; ++l) {
                    for (int q = -k; q <= k; ++q) {
                        const int p = Q - q;
                        if (std::abs(p) > l) continue;
                        const double w = table.kernel(k, q, l, p, K);
                        if (w != 0.0) rhs += w * coeffs.at(k, q) * coeffs.at(l, p);
                    }
                }
            }
            rhs *= static_cast<double>(parity_sign(two_j - Q));
            const Complex lhs = coeffs.at(K, Q) / static_cast<double>(2 * K + 1);
            std::ostringstream os;
            os << "quadratic K=" << K << " Q=" << Q;
            report.add(os.str(),
                       "c(K,Q)/(2K+1) = (-1)^{2j-Q} sum (3jm)(6j) c(k,q) c(l,p)",
                       std::abs(lhs - rhs), tol, coeffs.label());
        }
    }
    const double norm2 = vectorize(coeffs).norm_squared();
    report.add("normalization corollary", "|v|^2 = 1", std::abs(norm2 - 1.0), tol,
               coeffs.label());
    return report;
}

CheckReport check_sum_rule(const std::vector<TensorCoefficients>& family,
                           double identity_multiple, double tol) {
    if (family.empty()) throw std::invalid_argument("check_sum_rule: empty family");
    const int two_j = family.front().two_j();
    TensorCoefficients total(two_j, "family sum");
    for (const auto& member : family) {
        if (member.two_j() != two_j)
            throw std::invalid_argument("check_sum_rule: mixed two_j in family");
        for (std::size_t i = 0; i < total.raw().size(); ++i)
            total.raw()[i] += member.raw()[i];
    }
    // With u entries (-1)^{j-m} (j k j; -m q m'), the rule is equivalent to
    // reconstruct(sum of members) = s I entrywise; the phase cancels.
    const Eigen::MatrixXcd sum_op = reconstruct(total);
    const int d = two_j + 1;
    double worst = 0.0;
    int worst_row = 0, worst_col = 0;
    for (int row = 0; row < d; ++row) {
        for (int col = 0; col < d; ++col) {
            const Complex want = (row == col) ? Complex(identity_multiple, 0.0) : Complex(0.0);
            const double dev = std::abs(sum_op(row, col) - want);
            if (dev > worst) {
                worst = dev;
                worst_row = row;
                worst_col = col;
            }
        }
    }
    CheckReport report;
    std::ostringstream os;
    os << family.size() << " members, worst at m-row " << worst_row << " col " << worst_col;
    report.add("sum rule",
               "sum_x sum_kq c_kq(x) (j k j; -m q m') = (-1)^{j-m} s [m=m']", worst, tol,
               os.str());
    return report;
}

RankReport check_informational_completeness(const std::vector<FrameVector>& vectors) {
    const int two_j = common_two_j(vectors, "check_informational_completeness");
    const int n = static_cast<int>(vectors.size());
    const int dim = (two_j + 1) * (two_j + 1);
    Eigen::MatrixXcd stacked(n, dim);
    for (int x = 0; x < n; ++x)
        for (int i = 0; i < dim; ++i) stacked(x, i) = vectors[x][i];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
    RankReport report;
    report.required = dim;
    report.singular_values = svd.singularValues();
    const double cutoff =
        report.singular_values.size() ? report.singular_values(0) * 1e-10 : 0.0;
    for (int i = 0; i < report.singular_values.size(); ++i)
        if (report.singular_values(i) > cutoff) ++report.rank;
    report.complete = report.rank == dim;
    return report;
}

}  // namespace rf::frame
