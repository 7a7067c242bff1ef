#include "rf/frame.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

using namespace rf;
namespace fr = rf::frame;

namespace {

constexpr Complex kI(0.0, 1.0);

Eigen::MatrixXcd projector(const Eigen::VectorXcd& z) { return z * z.adjoint(); }

// d = 2 equiangular quadruple: the displacement orbit of the standard
// tetrahedron fiducial, applied by hand.
std::vector<Eigen::VectorXcd> tetrahedron_states() {
    const double theta = std::acos(1.0 / std::sqrt(3.0));
    Eigen::VectorXcd f(2);
    f << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), M_PI / 4.0);
    Eigen::MatrixXcd x(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    return {f, z * f, x * f, x * z * f};
}

Eigen::MatrixXcd random_hermitian(int d, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = Complex(u(rng), u(rng));
    return Eigen::MatrixXcd(0.5 * (a + a.adjoint()));
}

}  // namespace

TEST(FrameExpansion, IdentityHasOnlyScalarComponent) {
    auto c = fr::expand(Eigen::MatrixXcd::Identity(2, 2), 1);
    EXPECT_NEAR(c.at(0, 0).real(), std::sqrt(2.0), 1e-14);
    EXPECT_LT(std::abs(c.at(1, -1)) + std::abs(c.at(1, 0)) + std::abs(c.at(1, 1)),
              1e-14);
}

TEST(FrameExpansion, SpinUpProjectorComponents) {
    Eigen::VectorXcd up(2);
    up << 1, 0;
    auto c = fr::expand(projector(up), 1);
    EXPECT_NEAR(c.at(0, 0).real(), 0.70710678118654757, 1e-15);
    EXPECT_NEAR(c.at(1, 0).real(), 1.2247448713915889, 1e-15);
    EXPECT_LT(std::abs(c.at(1, -1)) + std::abs(c.at(1, 1)), 1e-15);
}

TEST(FrameExpansion, RoundTripsOnRandomOperators) {
    for (int two_j : {0, 1, 2, 3, 5, 8}) {
        const int d = two_j + 1;
        Eigen::MatrixXcd h = random_hermitian(d, 40u + static_cast<unsigned>(two_j));
        auto c = fr::expand(h, two_j);
        EXPECT_LT((fr::reconstruct(c) - h).cwiseAbs().maxCoeff(), 1e-12)
            << "two_j=" << two_j;
        // vectorize / devectorize is a relabeled bijection.
        auto back = fr::devectorize(fr::vectorize(c));
        double dev = 0.0;
        for (int i = 0; i < c.size(); ++i)
            dev = std::max(dev, std::abs(c.raw()[static_cast<size_t>(i)] -
                                         back.raw()[static_cast<size_t>(i)]));
        EXPECT_LT(dev, 1e-14);
    }
}

TEST(FrameExpansion, ScalarCoefficientReconstructsHalfIdentity) {
    TensorCoefficients c(1);
    c.set(0, 0, 1.0 / std::sqrt(2.0));
    EXPECT_LT((fr::reconstruct(c) - 0.5 * Eigen::MatrixXcd::Identity(2, 2))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-14);
    TensorCoefficients zero(2);
    EXPECT_LT(fr::reconstruct(zero).cwiseAbs().maxCoeff(), 1e-300);
}

TEST(FrameExpansion, VectorizeScalesByRootOrderWeight) {
    TensorCoefficients c(2);
    c.set(0, 0, 1.0);
    c.set(1, 1, 2.0);
    c.set(2, -2, -3.0 * kI);
    auto v = fr::vectorize(c);
    EXPECT_NEAR(v[0].real(), 1.0, 1e-15);
    EXPECT_NEAR(v[3].real(), 2.0 / std::sqrt(3.0), 1e-15);  // (1,1) lands at 3
    EXPECT_NEAR(v[4].imag(), -3.0 / std::sqrt(5.0), 1e-15);  // (2,-2) lands at 4
}

TEST(FrameExpansion, DimensionMismatchThrows) {
    EXPECT_THROW(fr::expand(Eigen::MatrixXcd::Identity(3, 3), 1),
                 std::invalid_argument);
    EXPECT_THROW(fr::expand(Eigen::MatrixXcd::Identity(2, 3), 1),
                 std::invalid_argument);
}

TEST(FrameChecks, FirstComponentPinnedValue) {
    Eigen::VectorXcd up(2);
    up << 1, 0;
    EXPECT_TRUE(fr::check_first_component(fr::expand(projector(up), 1)).all_pass());
    Eigen::VectorXcd e0(3);
    e0 << 1, 0, 0;
    EXPECT_TRUE(fr::check_first_component(fr::expand(projector(e0), 2)).all_pass());
    // Traceless input misses the 1/sqrt(d) value by construction.
    Eigen::MatrixXcd sz(2, 2);
    sz << 1, 0, 0, -1;
    EXPECT_FALSE(fr::check_first_component(fr::expand(sz, 1)).all_pass());
}

TEST(FrameChecks, ConjugationSeparatesHermitianInputs) {
    EXPECT_TRUE(fr::check_conjugation(fr::expand(random_hermitian(4, 7u), 3)).all_pass());
    Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(2, 2);
    shift(0, 1) = 1.0;  // strictly upper shift, not Hermitian
    EXPECT_FALSE(fr::check_conjugation(fr::expand(shift, 1)).all_pass());
    // Real diagonal operators expand with every q != 0 component zero.
    Eigen::MatrixXcd diag = Eigen::Vector3cd(0.3, -1.1, 0.4).asDiagonal();
    auto c = fr::expand(diag, 2);
    EXPECT_TRUE(fr::check_conjugation(c).all_pass());
    for (int k = 0; k <= 2; ++k)
        for (int q = -k; q <= k; ++q)
            if (q != 0) EXPECT_LT(std::abs(c.at(k, q)), 1e-14);
}

TEST(FrameChecks, RotationalInvarianceIsOverlapSquared) {
    Eigen::VectorXcd e0(2), e1(2);
    e0 << 1, 0;
    e1 << 0, 1;
    auto c0 = fr::expand(projector(e0), 1);
    auto c1 = fr::expand(projector(e1), 1);
    EXPECT_TRUE(fr::check_rotational_invariance(c0, c0, 1.0).all_pass());
    EXPECT_TRUE(fr::check_rotational_invariance(c0, c1, 0.0).all_pass());
    EXPECT_FALSE(fr::check_rotational_invariance(c0, c1, 0.5).all_pass());
}

TEST(FrameChecks, QuadraticSystemAcceptsOnlyProjectors) {
    Eigen::VectorXcd e1(3);
    e1 << 0, 1, 0;
    EXPECT_TRUE(fr::check_quadratic_system(fr::expand(projector(e1), 2)).all_pass());
    // P = I/2 has P^2 = P/2: every quadratic equation misses.
    auto half = fr::expand(0.5 * Eigen::MatrixXcd::Identity(2, 2), 1);
    EXPECT_FALSE(fr::check_quadratic_system(half).all_pass());
}

TEST(FrameChecks, SumRuleTracksIdentityMultiple) {
    std::vector<TensorCoefficients> family;
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(3);
        e(i) = 1.0;
        family.push_back(fr::expand(projector(e), 2));
    }
    EXPECT_TRUE(fr::check_sum_rule(family, 1.0).all_pass());
    family.pop_back();
    EXPECT_FALSE(fr::check_sum_rule(family, 1.0).all_pass());
}

TEST(FrameChecks, TetrahedronGramMatchesEquiangularTarget) {
    auto states = tetrahedron_states();
    std::vector<FrameVector> vecs;
    for (size_t i = 0; i < states.size(); ++i) {
        auto c = fr::expand(projector(states[i]), 1);
        c.set_label("x=" + std::to_string(i));
        vecs.push_back(fr::vectorize(c));
    }
    auto g = fr::gram(vecs, fr::sic_gram_target(2), "equiangular d=2");
    EXPECT_LT(g.max_deviation, 1e-12);
    ASSERT_EQ(g.eigen_spectrum.size(), 4);
    EXPECT_NEAR(g.eigen_spectrum(0), 2.0, 1e-12);
    for (int i = 1; i < 4; ++i) EXPECT_NEAR(g.eigen_spectrum(i), 2.0 / 3.0, 1e-12);

    auto rank = fr::check_informational_completeness(vecs);
    EXPECT_EQ(rank.rank, 4);
    EXPECT_TRUE(rank.complete);
    vecs.pop_back();
    auto partial = fr::check_informational_completeness(vecs);
    EXPECT_EQ(partial.rank, 3);
    EXPECT_FALSE(partial.complete);
}

TEST(FrameChecks, GramTargetShapes) {
    auto sic = fr::sic_gram_target(2);
    ASSERT_EQ(sic.rows(), 4);
    EXPECT_NEAR(sic(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(sic(0, 1), 1.0 / 3.0, 1e-15);
    auto mub = fr::mub_gram_target(2);
    ASSERT_EQ(mub.rows(), 6);  // (d+1) bases of d vectors
    EXPECT_NEAR(mub(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(mub(0, 1), 0.0, 1e-15);  // same basis, distinct vectors
    EXPECT_NEAR(mub(0, 2), 0.5, 1e-15);  // across bases
}

TEST(FrameChecks, GramInputValidation) {
    std::vector<FrameVector> empty;
    EXPECT_THROW(fr::gram(empty, fr::sic_gram_target(2), "t"), std::invalid_argument);
    std::vector<FrameVector> mixed{FrameVector(1), FrameVector(2)};
    EXPECT_THROW(fr::gram(mixed, fr::sic_gram_target(2), "t"), std::invalid_argument);
    std::vector<FrameVector> one{FrameVector(1)};
    EXPECT_THROW(fr::gram(one, fr::sic_gram_target(2), "t"), std::invalid_argument);
}

TEST(FrameChecks, SingleVectorGramIsItsNormSquared) {
    Eigen::VectorXcd e0(2);
    e0 << 1, 0;
    std::vector<FrameVector> one{fr::vectorize(fr::expand(projector(e0), 1))};
    Eigen::MatrixXd target(1, 1);
    target << 1.0;
    auto g = fr::gram(one, target, "single");
    ASSERT_EQ(g.matrix.rows(), 1);
    EXPECT_NEAR(g.matrix(0, 0).real(), 1.0, 1e-12);
    EXPECT_LT(g.max_deviation, 1e-12);
}

// Every structural check passes simultaneously on an exact projector family.
TEST(FrameChecks, BasisProjectorFamilyPassesEverything) {
    const int two_j = 3;
    const int d = two_j + 1;
    std::vector<TensorCoefficients> family;
    std::vector<FrameVector> vecs;
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d);
        e(i) = 1.0;
        auto c = fr::expand(projector(e), two_j);
        vecs.push_back(fr::vectorize(c));
        family.push_back(std::move(c));
    }
    for (const auto& c : family) {
        EXPECT_TRUE(fr::check_first_component(c).all_pass());
        EXPECT_TRUE(fr::check_conjugation(c).all_pass());
        EXPECT_TRUE(fr::check_quadratic_system(c).all_pass());
    }
    EXPECT_TRUE(fr::check_sum_rule(family, 1.0).all_pass());
    // d basis projectors span only the diagonal operators.
    auto rank = fr::check_informational_completeness(vecs);
    EXPECT_EQ(rank.rank, d);
    EXPECT_FALSE(rank.complete);
    EXPECT_EQ(rank.required, d * d);
}
