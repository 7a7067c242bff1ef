#include "rf/mub.hpp"

#include "rf/half_int.hpp"
#include "rf/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rf::mub {

namespace {

void validate_set(const MubSet& set, const char* caller) {
    const int d = set.d();
    if (set.two_j < 0) throw std::invalid_argument(std::string(caller) + ": two_j < 0");
    if (set.basis_count() == 0)
        throw std::invalid_argument(std::string(caller) + ": no bases");
    for (const auto& b : set.bases)
        if (b.rows() != d || b.cols() != d)
            throw std::invalid_argument(std::string(caller) + ": basis shape mismatch");
}

std::string member_label(int a, int alpha) {
    std::ostringstream os;
    os << "a=" << a << " alpha=" << alpha;
    return os.str();
}

}  // namespace

Complex unit_phase(long t2, int den) {
    const long period = 2L * den;
    long r = t2 % period;
    if (r < 0) r += period;
    if (r == 0) return {1.0, 0.0};
    if (2 * r == period) return {-1.0, 0.0};
    if (4 * r == period) return {0.0, 1.0};
    if (4 * r == 3 * period) return {0.0, -1.0};
    const double angle = std::numbers::pi * static_cast<double>(r) / den;
    return {std::cos(angle), std::sin(angle)};
}

bool is_prime(int n) {
    if (n < 2) return false;
    for (int p = 2; static_cast<long>(p) * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

MubSet build_prime_mubs(int d) {
    if (!is_prime(d)) {
        std::ostringstream os;
        os << "build_prime_mubs: d = " << d
           << " is not prime; the explicit construction needs a prime dimension";
        throw std::invalid_argument(os.str());
    }
    const int two_j = d - 1;
    MubSet set{two_j, {}};
    set.bases.reserve(d + 1);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (int a = 0; a < d; ++a) {
        Eigen::MatrixXcd basis(d, d);
        for (int alpha = 0; alpha < d; ++alpha) {
            for (int row = 0; row < d; ++row) {
                const int tm = two_j - 2 * row;
                const int j_plus_m = (two_j + tm) / 2;
                const int j_minus_m_1 = row + 1;
                const long t2 = static_cast<long>(j_plus_m) * j_minus_m_1 * a +
                                2L * j_plus_m * alpha;
                basis(row, alpha) = norm * unit_phase(t2, d);
            }
        }
        set.bases.push_back(std::move(basis));
    }
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    for (int alpha = 0; alpha < d; ++alpha) comp(d - 1 - alpha, alpha) = 1.0;
    set.bases.push_back(std::move(comp));
    return set;
}

CheckReport verify_mubs(const MubSet& set, double tol) {
    validate_set(set, "verify_mubs");
    const int d = set.d();
    const int nb = set.basis_count();
    CheckReport report;
    for (int a = 0; a < nb; ++a) {
        const Eigen::MatrixXcd overlap = set.bases[a].adjoint() * set.bases[a];
        double worst = 0.0;
        int wa = 0, wb = 0;
        for (int x = 0; x < d; ++x) {
            for (int y = 0; y < d; ++y) {
                const double dev =
                    std::abs(overlap(x, y) - (x == y ? Complex(1.0) : Complex(0.0)));
                if (dev > worst) {
                    worst = dev;
                    wa = x;
                    wb = y;
                }
            }
        }
        std::ostringstream os;
        os << "worst at alpha=" << wa << " beta=" << wb;
        report.add("orthonormal a=" + std::to_string(a),
                   "<a,alpha|a,beta> = [alpha=beta]", worst, tol, os.str());
    }
    const double cross = 1.0 / d;
    for (int a = 0; a < nb; ++a) {
        for (int b = a + 1; b < nb; ++b) {
            const Eigen::MatrixXcd overlap = set.bases[a].adjoint() * set.bases[b];
            double worst = 0.0;
            int wa = 0, wb = 0;
            for (int x = 0; x < d; ++x) {
                for (int y = 0; y < d; ++y) {
                    const double dev = std::abs(std::norm(overlap(x, y)) - cross);
                    if (dev > worst) {
                        worst = dev;
                        wa = x;
                        wb = y;
                    }
                }
            }
            std::ostringstream os;
            os << "worst at alpha=" << wa << " beta=" << wb;
            report.add("unbiased a=" + std::to_string(a) + " b=" + std::to_string(b),
                       "|<a,alpha|b,beta>|^2 = 1/d", worst, tol, os.str());
        }
    }
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& basis : set.bases) sum += basis * basis.adjoint();
    const double dev =
        (sum / static_cast<double>(nb) - Eigen::MatrixXcd::Identity(d, d))
            .cwiseAbs()
            .maxCoeff();
    report.add("identity decomposition",
               "(1/(d+1)) sum_{a,alpha} |a,alpha><a,alpha| = I", dev, tol);
    return report;
}

std::vector<TensorCoefficients> mub_coefficients(const MubSet& set) {
    validate_set(set, "mub_coefficients");
    const int d = set.d();
    std::vector<TensorCoefficients> coeffs;
    coeffs.reserve(static_cast<std::size_t>(set.basis_count()) * d);
    for (int a = 0; a < set.basis_count(); ++a) {
        for (int alpha = 0; alpha < d; ++alpha) {
            const Eigen::VectorXcd v = set.vector(a, alpha);
            const Eigen::MatrixXcd proj = v * v.adjoint();
            coeffs.push_back(frame::expand(proj, set.two_j, member_label(a, alpha)));
        }
    }
    return coeffs;
}

Complex closed_form_dkq(int d, int a, int alpha, int k, int q) {
    if (!is_prime(d)) throw std::invalid_argument("closed_form_dkq: d must be prime");
    const int two_j = d - 1;
    if (a < 0 || a > d || alpha < 0 || alpha >= d || k < 0 || k > two_j ||
        std::abs(q) > k)
        throw std::invalid_argument("closed_form_dkq: index out of range");
    const HalfInt j = HalfInt::from_twice(two_j);
    const HalfInt hk = HalfInt::whole(k);
    if (a == d) {
        if (q != 0) return {0.0, 0.0};
        const int tm = 2 * alpha - two_j;
        const double sym =
            wigner::three_jm(j, hk, j, HalfInt::from_twice(-tm), HalfInt::whole(0),
                             HalfInt::from_twice(tm))
                .to_double();
        return {(2 * k + 1) * parity_sign((two_j - tm) / 2) * sym, 0.0};
    }
    const HalfInt hq = HalfInt::whole(q);
    Complex sum = 0.0;
    for (int tm = -two_j; tm <= two_j; tm += 2) {
        const int tmp = tm - 2 * q;
        if (std::abs(tmp) > two_j) continue;
        // theta = (m-m')[(1-m-m')a/2 + alpha], doubled to stay integral
        const long theta2 =
            static_cast<long>(q) * ((1 - (tm + tmp) / 2) * a + 2L * alpha);
        const double sym = wigner::three_jm(j, hk, j, HalfInt::from_twice(-tm), hq,
                                            HalfInt::from_twice(tmp))
                               .to_double();
        sum += unit_phase(theta2, d) * static_cast<double>(parity_sign((two_j - tm) / 2)) *
               sym;
    }
    return sum * (static_cast<double>(2 * k + 1) / d);
}

CheckReport check_closed_form(const MubSet& set, double tol) {
    validate_set(set, "check_closed_form");
    const int d = set.d();
    const auto expanded = mub_coefficients(set);
    double worst = 0.0;
    std::string worst_where;
    std::size_t idx = 0;
    for (int a = 0; a < set.basis_count(); ++a) {
        for (int alpha = 0; alpha < d; ++alpha, ++idx) {
            const auto& c = expanded[idx];
            for (int k = 0; k <= set.two_j; ++k) {
                for (int q = -k; q <= k; ++q) {
                    const Complex direct = closed_form_dkq(d, a, alpha, k, q);
                    const double dev = std::abs(direct - c.at(k, q));
                    if (dev > worst) {
                        worst = dev;
                        std::ostringstream os;
                        os << member_label(a, alpha) << " k=" << k << " q=" << q;
                        worst_where = os.str();
                    }
                }
            }
        }
    }
    CheckReport report;
    report.add("closed form agreement",
               "projector expansion equals the construction-phase formula", worst, tol,
               worst_where);
    return report;
}

CheckReport coefficient_battery(const MubSet& set, double tol) {
    validate_set(set, "coefficient_battery");
    const int d = set.d();
    const auto coeffs = mub_coefficients(set);
    CheckReport report;

    double worst_first = 0.0, worst_conj = 0.0;
    std::string who_first, who_conj;
    for (const auto& c : coeffs) {
        const double rf_ = frame::check_first_component(c, tol).max_residual();
        if (rf_ > worst_first) {
            worst_first = rf_;
            who_first = c.label();
        }
        const double rc = frame::check_conjugation(c, tol).max_residual();
        if (rc > worst_conj) {
            worst_conj = rc;
            who_conj = c.label();
        }
    }
    report.add("first component", "d(0,0) = 1/sqrt(2j+1) for every member", worst_first,
               tol, who_first);
    report.add("conjugation", "conj(d(k,q)) = (-1)^q d(k,-q) for every member",
               worst_conj, tol, who_conj);

    std::vector<FrameVector> vectors;
    vectors.reserve(coeffs.size());
    for (const auto& c : coeffs) vectors.push_back(frame::vectorize(c));
    double worst_rot = 0.0;
    std::string who_rot;
    const int n = static_cast<int>(vectors.size());
    for (int x = 0; x < n; ++x) {
        const int ax = x / d;
        for (int y = 0; y < n; ++y) {
            const int ay = y / d;
            const double expected = (x == y) ? 1.0 : (ax == ay ? 0.0 : 1.0 / d);
            const double dev =
                std::abs(vectors[x].dot(vectors[y]) - Complex(expected, 0.0));
            if (dev > worst_rot) {
                worst_rot = dev;
                who_rot = vectors[x].label() + " . " + vectors[y].label();
            }
        }
    }
    report.add("rotational invariance",
               "sum_k 1/(2k+1) sum_q conj(d_kq) d'_kq = [same member] + [cross basis]/d",
               worst_rot, tol, who_rot);

    double worst_quad = 0.0;
    std::string who_quad;
    for (const auto& c : coeffs) {
        const auto quad = frame::check_quadratic_system(c, tol);
        const double r = quad.max_residual();
        if (r > worst_quad) {
            worst_quad = r;
            who_quad = c.label();
        }
    }
    report.add("quadratic system",
               "d(K,Q)/(2K+1) = (-1)^{2j-Q} sum (3jm)(6j) d(k,q) d(l,p) per member",
               worst_quad, tol, who_quad);

    report.merge(frame::check_sum_rule(coeffs, d + 1.0, tol));
    return report;
}

}  // namespace rf::mub
