#include "rf/sic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rf::sic {

namespace {

// Top 53 bits of the raw engine output, platform-stable by construction.
double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void gaussian_pair(std::mt19937_64& rng, double& g0, double& g1) {
    double u1 = uniform53(rng);
    while (u1 <= 0.0) u1 = uniform53(rng);
    const double u2 = uniform53(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    g0 = r * std::cos(2.0 * std::numbers::pi * u2);
    g1 = r * std::sin(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXcd random_state(std::mt19937_64& rng, int d) {
    Eigen::VectorXcd z(d);
    for (int i = 0; i < d; ++i) {
        double re, im;
        gaussian_pair(rng, re, im);
        z(i) = Complex(re, im);
    }
    z.normalize();
    return z;
}

std::vector<Complex> omega_table(int d) {
    std::vector<Complex> omega(d);
    for (int t = 0; t < d; ++t) {
        const double angle = 2.0 * std::numbers::pi * t / d;
        omega[t] = {std::cos(angle), std::sin(angle)};
    }
    return omega;
}

// First nonzero component made real nonnegative; removes the global phase.
void gauge_fix(Eigen::VectorXcd& z) {
    for (int i = 0; i < z.size(); ++i) {
        const double mag = std::abs(z(i));
        if (mag > 1e-14) {
            z *= std::conj(z(i)) / mag;
            break;
        }
    }
}

double pair_target(int d) { return 1.0 / (d + 1); }

// Worst deviation of |<x|y>|^2 from 1/(d+1) over distinct pairs.
double family_residual(const std::vector<Eigen::VectorXcd>& states, int d, int* wx = nullptr,
                       int* wy = nullptr) {
    const double c = pair_target(d);
    double worst = 0.0;
    for (std::size_t x = 0; x < states.size(); ++x) {
        for (std::size_t y = x + 1; y < states.size(); ++y) {
            const double dev = std::abs(std::norm(states[x].dot(states[y])) - c);
            if (dev > worst) {
                worst = dev;
                if (wx) *wx = static_cast<int>(x);
                if (wy) *wy = static_cast<int>(y);
            }
        }
    }
    return worst;
}

// Displacement overlaps o_ab = <z|X^a Z^b|z> for all (a,b) != (0,0), their
// objective sum_{ab} (|o_ab|^2 - c)^2, worst single deviation, and optionally
// the gradient with respect to conj(z).
struct CovariantEval {
    double objective = 0.0;
    double worst = 0.0;
};

CovariantEval covariant_eval(const Eigen::VectorXcd& z, int d,
                             const std::vector<Complex>& omega,
                             Eigen::VectorXcd* grad) {
    const double c = pair_target(d);
    CovariantEval out;
    if (grad) grad->setZero(d);
    Eigen::VectorXcd dz(d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            if (a == 0 && b == 0) continue;
            // (X^a Z^b z)_r = omega^{b s} z_s with s = (r - a) mod d
            Complex o = 0.0;
            for (int r = 0; r < d; ++r) {
                const int s = (r - a + d) % d;
                dz(r) = omega[(static_cast<long>(b) * s) % d] * z(s);
                o += std::conj(z(r)) * dz(r);
            }
            const double dev = std::norm(o) - c;
            out.objective += dev * dev;
            out.worst = std::max(out.worst, std::abs(dev));
            if (grad) {
                // d|o|^2/dconj(z) = conj(o) (D z) + o (D^H z), with
                // (D^H z)_r = conj(omega^{b r}) z_{(r+a) mod d}
                const Complex w = 2.0 * dev * std::conj(o);
                for (int r = 0; r < d; ++r) {
                    const int s = (r + a) % d;
                    (*grad)(r) += w * dz(r) +
                                  std::conj(w) *
                                      (std::conj(omega[(static_cast<long>(b) * r) % d]) * z(s));
                }
            }
        }
    }
    return out;
}

// Least-squares view for the polish stage: residual vector r holds the norm
// defect ||z||^2 - 1 followed by every overlap defect |o_ab|^2 - 1/(d+1),
// and J its Jacobian with respect to (Re z, Im z).  Plain descent crawls
// along the nearly flat valleys this objective develops (d = 3 has a whole
// curve of solutions), while a damped Gauss-Newton step is immune to that
// conditioning, so the search finishes with a few of these.
double covariant_residuals(const Eigen::VectorXcd& z, int d,
                           const std::vector<Complex>& omega, Eigen::VectorXd& r,
                           Eigen::MatrixXd* jac) {
    const double c = pair_target(d);
    r(0) = z.squaredNorm() - 1.0;
    if (jac) {
        for (int i = 0; i < d; ++i) {
            (*jac)(0, i) = 2.0 * z(i).real();
            (*jac)(0, d + i) = 2.0 * z(i).imag();
        }
    }
    double worst = std::abs(r(0));
    Eigen::VectorXcd dz(d);
    int row = 1;
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            if (a == 0 && b == 0) continue;
            Complex o = 0.0;
            for (int rr = 0; rr < d; ++rr) {
                const int s = (rr - a + d) % d;
                dz(rr) = omega[(static_cast<long>(b) * s) % d] * z(s);
                o += std::conj(z(rr)) * dz(rr);
            }
            r(row) = std::norm(o) - c;
            worst = std::max(worst, std::abs(r(row)));
            if (jac) {
                for (int rr = 0; rr < d; ++rr) {
                    const int s = (rr + a) % d;
                    const Complex w =
                        std::conj(o) * dz(rr) +
                        o * (std::conj(omega[(static_cast<long>(b) * rr) % d]) * z(s));
                    (*jac)(row, rr) = 2.0 * w.real();
                    (*jac)(row, d + rr) = 2.0 * w.imag();
                }
            }
            ++row;
        }
    }
    return worst;
}

void covariant_polish(Eigen::VectorXcd& z, int d, const std::vector<Complex>& omega,
                      double target, int max_steps) {
    const int m = d * d;
    const int p = 2 * d;
    Eigen::VectorXd r(m), rt(m);
    Eigen::MatrixXd jac(m, p);
    double worst = covariant_residuals(z, d, omega, r, &jac);
    double obj = r.squaredNorm();
    double lambda = 1e-3;
    for (int iter = 0; iter < max_steps; ++iter) {
        if (worst < target || lambda > 1e10) break;
        Eigen::MatrixXd h = jac.transpose() * jac;
        h.diagonal().array() += lambda;
        const Eigen::VectorXd delta = h.ldlt().solve(-(jac.transpose() * r));
        Eigen::VectorXcd zt(d);
        for (int i = 0; i < d; ++i) zt(i) = z(i) + Complex(delta(i), delta(d + i));
        covariant_residuals(zt, d, omega, rt, nullptr);
        const double objt = rt.squaredNorm();
        if (objt < obj) {
            z = zt;
            worst = covariant_residuals(z, d, omega, r, &jac);
            obj = r.squaredNorm();
            lambda = std::max(lambda / 3.0, 1e-12);
        } else {
            lambda *= 4.0;
        }
    }
    z.normalize();
}

struct FreeEval {
    double objective = 0.0;
    double worst = 0.0;
};

// Same polish for the non-covariant mode, over the stacked states: columns
// [2dx, 2dx + d) hold Re z_x and the next d columns Im z_x; rows are the n
// norm defects then the n(n-1)/2 pair defects.  Skipped when the parameter
// count would make the normal equations expensive.
void free_polish(std::vector<Eigen::VectorXcd>& states, int d, double target,
                 int max_steps) {
    const int n = static_cast<int>(states.size());
    const int p = 2 * n * d;
    if (p > 300) return;
    const int m = n + n * (n - 1) / 2;
    const double c = pair_target(d);

    const auto fill = [&](const std::vector<Eigen::VectorXcd>& zs, Eigen::VectorXd& r,
                          Eigen::MatrixXd* jac) {
        double worst = 0.0;
        if (jac) jac->setZero();
        for (int x = 0; x < n; ++x) {
            r(x) = zs[x].squaredNorm() - 1.0;
            worst = std::max(worst, std::abs(r(x)));
            if (jac) {
                for (int i = 0; i < d; ++i) {
                    (*jac)(x, 2 * d * x + i) = 2.0 * zs[x](i).real();
                    (*jac)(x, 2 * d * x + d + i) = 2.0 * zs[x](i).imag();
                }
            }
        }
        int row = n;
        for (int x = 0; x < n; ++x) {
            for (int y = x + 1; y < n; ++y, ++row) {
                const Complex o = zs[x].dot(zs[y]);
                r(row) = std::norm(o) - c;
                worst = std::max(worst, std::abs(r(row)));
                if (jac) {
                    for (int i = 0; i < d; ++i) {
                        const Complex wx = std::conj(o) * zs[y](i);
                        const Complex wy = o * zs[x](i);
                        (*jac)(row, 2 * d * x + i) = 2.0 * wx.real();
                        (*jac)(row, 2 * d * x + d + i) = 2.0 * wx.imag();
                        (*jac)(row, 2 * d * y + i) = 2.0 * wy.real();
                        (*jac)(row, 2 * d * y + d + i) = 2.0 * wy.imag();
                    }
                }
            }
        }
        return worst;
    };

    Eigen::VectorXd r(m), rt(m);
    Eigen::MatrixXd jac(m, p);
    double worst = fill(states, r, &jac);
    double obj = r.squaredNorm();
    double lambda = 1e-3;
    std::vector<Eigen::VectorXcd> trial(states.size());
    for (int iter = 0; iter < max_steps; ++iter) {
        if (worst < target || lambda > 1e10) break;
        Eigen::MatrixXd h = jac.transpose() * jac;
        h.diagonal().array() += lambda;
        const Eigen::VectorXd delta = h.ldlt().solve(-(jac.transpose() * r));
        for (int x = 0; x < n; ++x) {
            trial[x] = states[x];
            for (int i = 0; i < d; ++i)
                trial[x](i) += Complex(delta(2 * d * x + i), delta(2 * d * x + d + i));
        }
        fill(trial, rt, nullptr);
        const double objt = rt.squaredNorm();
        if (objt < obj) {
            states = trial;
            worst = fill(states, r, &jac);
            obj = r.squaredNorm();
            lambda = std::max(lambda / 3.0, 1e-12);
        } else {
            lambda *= 4.0;
        }
    }
    for (auto& z : states) z.normalize();
}

FreeEval free_eval(const std::vector<Eigen::VectorXcd>& states, int d,
                   std::vector<Eigen::VectorXcd>* grad) {
    const double c = pair_target(d);
    const int n = static_cast<int>(states.size());
    FreeEval out;
    if (grad)
        for (auto& g : *grad) g.setZero(d);
    for (int x = 0; x < n; ++x) {
        for (int y = x + 1; y < n; ++y) {
            const Complex o = states[x].dot(states[y]);
            const double dev = std::norm(o) - c;
            out.objective += dev * dev;
            out.worst = std::max(out.worst, std::abs(dev));
            if (grad) {
                (*grad)[x] += (2.0 * dev * std::conj(o)) * states[y];
                (*grad)[y] += (2.0 * dev * o) * states[x];
            }
        }
    }
    return out;
}

SicCandidate finish_candidate(int d, const Eigen::VectorXcd& fiducial, double tolerance) {
    SicCandidate cand;
    cand.two_j = d - 1;
    cand.covariant = true;
    cand.fiducial = fiducial;
    gauge_fix(cand.fiducial);
    cand.states = wh_orbit(cand.fiducial);
    cand.residual = family_residual(cand.states, d);
    cand.converged = cand.residual < tolerance;
    return cand;
}

SicCandidate finish_free_candidate(int d, std::vector<Eigen::VectorXcd> states,
                                   double tolerance) {
    SicCandidate cand;
    cand.two_j = d - 1;
    cand.covariant = false;
    cand.states = std::move(states);
    for (auto& z : cand.states) gauge_fix(z);
    cand.residual = family_residual(cand.states, d);
    cand.converged = cand.residual < tolerance;
    return cand;
}

}  // namespace

std::vector<Eigen::VectorXcd> wh_orbit(const Eigen::VectorXcd& fiducial) {
    const int d = static_cast<int>(fiducial.size());
    if (d < 1) throw std::invalid_argument("wh_orbit: empty fiducial");
    if (std::abs(fiducial.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("wh_orbit: fiducial must have unit norm");
    const auto omega = omega_table(d);
    std::vector<Eigen::VectorXcd> states;
    states.reserve(static_cast<std::size_t>(d) * d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            Eigen::VectorXcd z(d);
            for (int r = 0; r < d; ++r) {
                const int s = (r - a + d) % d;
                z(r) = omega[(static_cast<long>(b) * s) % d] * fiducial(s);
            }
            states.push_back(std::move(z));
        }
    }
    return states;
}

CheckReport verify_sic(const SicCandidate& cand, double tol) {
    const int d = cand.d();
    const int n = d * d;
    if (static_cast<int>(cand.states.size()) != n)
        throw std::invalid_argument("verify_sic: candidate must hold d^2 states");
    for (const auto& z : cand.states)
        if (z.size() != d) throw std::invalid_argument("verify_sic: state dimension mismatch");
    CheckReport report;

    double worst_norm = 0.0;
    int worst_norm_x = 0;
    for (int x = 0; x < n; ++x) {
        const double dev = std::abs(cand.states[x].norm() - 1.0);
        if (dev > worst_norm) {
            worst_norm = dev;
            worst_norm_x = x;
        }
    }
    report.add("unit norms", "||state|| = 1", worst_norm, frame::kExactTol,
               "worst at x=" + std::to_string(worst_norm_x));

    int wx = 0, wy = 0;
    const double worst_pair = family_residual(cand.states, d, &wx, &wy);
    {
        std::ostringstream os;
        os << "worst at x=" << wx << " y=" << wy;
        report.add("equiangular overlaps", "|<x|y>|^2 = 1/(d+1) for x != y", worst_pair,
                   tol, os.str());
    }

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& z : cand.states) sum += z * z.adjoint();
    const double dev_identity =
        (sum / static_cast<double>(d) - Eigen::MatrixXcd::Identity(d, d))
            .cwiseAbs()
            .maxCoeff();
    report.add("identity decomposition", "(1/d) sum_x |x><x| = I", dev_identity, tol);

    std::vector<FrameVector> vectors;
    vectors.reserve(cand.states.size());
    for (const auto& c : sic_coefficients(cand)) vectors.push_back(frame::vectorize(c));
    const auto rank = frame::check_informational_completeness(vectors);
    report.add("informational completeness", "vectorized family has rank (2j+1)^2",
               static_cast<double>(rank.required - rank.rank), 0.0,
               "rank " + std::to_string(rank.rank) + "/" + std::to_string(rank.required));
    return report;
}

SicCandidate search_fiducial(const SearchConfig& config) {
    if (config.d < 1) throw std::invalid_argument("search_fiducial: d must be >= 1");
    if (config.restarts < 1 || config.max_iterations < 1 || config.tolerance <= 0.0)
        throw std::invalid_argument("search_fiducial: invalid budget");
    const int d = config.d;
    if (d == 1) {
        SicCandidate cand;
        cand.two_j = 0;
        cand.fiducial = Eigen::VectorXcd::Ones(1);
        cand.covariant = true;
        cand.states = {cand.fiducial};
        cand.converged = true;
        cand.residual = 0.0;
        return cand;
    }
    const auto omega = omega_table(d);

    SicCandidate best;
    bool have_best = false;

    for (int restart = 0; restart < config.restarts; ++restart) {
        std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(restart));
        const double target = 0.1 * config.tolerance;
        const double handoff = std::max(target, 1e-3);
        SicCandidate cand;
        if (config.covariant) {
            Eigen::VectorXcd z = random_state(rng, d);
            Eigen::VectorXcd grad(d), trial(d);
            auto eval = covariant_eval(z, d, omega, &grad);
            double step = 0.1;
            double window = eval.objective;
            for (int iter = 0; iter < config.max_iterations; ++iter) {
                if (eval.worst < handoff || step < 1e-16) break;
                if (iter % 256 == 255) {
                    if (eval.objective > 0.95 * window) break;
                    window = eval.objective;
                }
                trial = z - step * grad;
                trial.normalize();
                const auto trial_eval = covariant_eval(trial, d, omega, nullptr);
                if (trial_eval.objective < eval.objective) {
                    z = trial;
                    eval = covariant_eval(z, d, omega, &grad);
                    step *= 1.1;
                } else {
                    step *= 0.5;
                }
            }
            if (eval.worst >= target) covariant_polish(z, d, omega, target, 500);
            cand = finish_candidate(d, z, config.tolerance);
        } else {
            std::vector<Eigen::VectorXcd> states(static_cast<std::size_t>(d) * d);
            for (auto& z : states) z = random_state(rng, d);
            const bool can_polish = 2 * d * d * d <= 300;
            const double free_handoff = can_polish ? handoff : target;
            std::vector<Eigen::VectorXcd> grad(states.size()), trial(states.size());
            auto eval = free_eval(states, d, &grad);
            double step = 0.1;
            double window = eval.objective;
            for (int iter = 0; iter < config.max_iterations; ++iter) {
                if (eval.worst < free_handoff || step < 1e-16) break;
                if (iter % 256 == 255) {
                    if (eval.objective > 0.95 * window) break;
                    window = eval.objective;
                }
                for (std::size_t i = 0; i < states.size(); ++i) {
                    trial[i] = states[i] - step * grad[i];
                    trial[i].normalize();
                }
                const auto trial_eval = free_eval(trial, d, nullptr);
                if (trial_eval.objective < eval.objective) {
                    states.swap(trial);
                    eval = free_eval(states, d, &grad);
                    step *= 1.1;
                } else {
                    step *= 0.5;
                }
            }
            if (eval.worst >= target) free_polish(states, d, target, 500);
            cand = finish_free_candidate(d, std::move(states), config.tolerance);
        }
        if (!have_best || cand.residual < best.residual) {
            best = std::move(cand);
            have_best = true;
        }
        if (best.converged) break;
    }
    return best;
}

std::vector<TensorCoefficients> sic_coefficients(const SicCandidate& cand) {
    const int d = cand.d();
    std::vector<TensorCoefficients> coeffs;
    coeffs.reserve(cand.states.size());
    for (std::size_t x = 0; x < cand.states.size(); ++x) {
        const Eigen::MatrixXcd proj = cand.states[x] * cand.states[x].adjoint();
        coeffs.push_back(frame::expand(proj, d - 1, "x=" + std::to_string(x)));
    }
    return coeffs;
}

CheckReport coefficient_battery(const SicCandidate& cand, double tol) {
    const int d = cand.d();
    const int n = d * d;
    if (static_cast<int>(cand.states.size()) != n)
        throw std::invalid_argument("coefficient_battery: candidate must hold d^2 states");
    const auto coeffs = sic_coefficients(cand);
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
    report.add("first component", "c(0,0) = 1/sqrt(2j+1) for every member", worst_first,
               tol, who_first);
    report.add("conjugation", "conj(c(k,q)) = (-1)^q c(k,-q) for every member",
               worst_conj, tol, who_conj);

    std::vector<FrameVector> vectors;
    vectors.reserve(coeffs.size());
    for (const auto& c : coeffs) vectors.push_back(frame::vectorize(c));
    const double cross = pair_target(d);
    double worst_rot = 0.0;
    std::string who_rot;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            const double expected = (x == y) ? 1.0 : cross;
            const double dev =
                std::abs(vectors[x].dot(vectors[y]) - Complex(expected, 0.0));
            if (dev > worst_rot) {
                worst_rot = dev;
                who_rot = vectors[x].label() + " . " + vectors[y].label();
            }
        }
    }
    report.add("rotational invariance",
               "sum_k 1/(2k+1) sum_q conj(c_kq) c'_kq = [same member] + [distinct]/(d+1)",
               worst_rot, tol, who_rot);

    double worst_quad = 0.0;
    std::string who_quad;
    for (const auto& c : coeffs) {
        const double r = frame::check_quadratic_system(c, tol).max_residual();
        if (r > worst_quad) {
            worst_quad = r;
            who_quad = c.label();
        }
    }
    report.add("quadratic system",
               "c(K,Q)/(2K+1) = (-1)^{2j-Q} sum (3jm)(6j) c(k,q) c(l,p) per member",
               worst_quad, tol, who_quad);

    report.merge(frame::check_sum_rule(coeffs, static_cast<double>(d), tol));

    const auto gram = frame::gram(vectors, frame::sic_gram_target(d), "equiangular");
    double spectrum_dev = 0.0;
    if (gram.eigen_spectrum.size() > 0) {
        spectrum_dev = std::abs(gram.eigen_spectrum(0) - static_cast<double>(d));
        const double bulk = static_cast<double>(d) / (d + 1);
        for (int i = 1; i < gram.eigen_spectrum.size(); ++i)
            spectrum_dev = std::max(spectrum_dev, std::abs(gram.eigen_spectrum(i) - bulk));
    }
    report.add("gram spectrum", "eigenvalues are {d, d/(d+1) with multiplicity d^2-1}",
               spectrum_dev, kSpectrumTol);
    return report;
}

CheckReport check_state_vector_equivalence(const SicCandidate& cand, double tol) {
    const int n = static_cast<int>(cand.states.size());
    std::vector<FrameVector> vectors;
    vectors.reserve(cand.states.size());
    for (const auto& c : sic_coefficients(cand)) vectors.push_back(frame::vectorize(c));
    double worst = 0.0;
    std::string where;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            const double overlap = std::norm(cand.states[x].dot(cand.states[y]));
            const double dev = std::abs(vectors[x].dot(vectors[y]) - Complex(overlap, 0.0));
            if (dev > worst) {
                worst = dev;
                where = "x=" + std::to_string(x) + " y=" + std::to_string(y);
            }
        }
    }
    CheckReport report;
    report.add("state/vector agreement",
               "|<x|y>|^2 from states equals v(x).v(y) from coefficients", worst, tol,
               where);
    return report;
}

}  // namespace rf::sic
