// test_hilbert.cpp — Fock and qubit operators, special functions, tensor products

#include "oracles.hpp"
#include "rabiqpt/errors.hpp"
#include "rabiqpt/hilbert.hpp"
#include "rabiqpt/model.hpp"
#include "rabiqpt/special.hpp"

#include <gtest/gtest.h>

using namespace rabiqpt;

TEST(Annihilation, CutoffTwoIsSingleEntry) {
    const Matrix a = annihilation(FockSpace(2));
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 1) = 1.0;
    EXPECT_EQ(max_abs(a - expected), 0.0);
}

TEST(Annihilation, LowersFockThree) {
    const FockSpace s(4);
    const Vector out = annihilation(s) * fock_state(3, s);
    EXPECT_NEAR(max_abs(out - std::sqrt(3.0) * fock_state(2, s)), 0.0, 1e-15);
}

TEST(Annihilation, CanonicalCommutatorBelowTop) {
    const FockSpace s(20);
    const Matrix a = annihilation(s);
    const Matrix c = a * a.adjoint() - a.adjoint() * a;
    EXPECT_LT(max_abs(c.topLeftCorner(19, 19) - Matrix::Identity(19, 19)), 1e-12);
}

TEST(FockSpace, RejectsTinyCutoff) { EXPECT_THROW(FockSpace(1), DomainError); }

TEST(QubitSpace, RejectsOtherLevelCounts) {
    EXPECT_THROW(QubitSpace(1), DomainError);
    EXPECT_THROW(QubitSpace(4), DomainError);
}

TEST(Displacement, ZeroIsIdentity) {
    const FockSpace s(12);
    EXPECT_LT(max_abs(displacement(0.0, s) - Matrix::Identity(12, 12)), 1e-14);
}

TEST(Displacement, CoherentStateHasPoissonStatistics) {
    const FockSpace s(30);
    const Vector psi = displacement(1.0, s) * fock_state(0, s);
    for (int n = 0; n < 30; ++n) {
        const double poisson = std::exp(-1.0) / oracle::factorial(n);
        EXPECT_NEAR(std::norm(psi(n)), poisson, 1e-8) << "n = " << n;
    }
}

TEST(Displacement, InverseUndoes) {
    const FockSpace s(30);
    const cd beta{0.7, 0.3};
    EXPECT_LT(max_abs(displacement(-beta, s) * displacement(beta, s) - Matrix::Identity(30, 30)), 1e-9);
}

TEST(Displacement, TruncationWarningForLargeAmplitude) {
    const FockSpace s(10);
    TruncationReport small, large;
    displacement(0.5, s, &small);
    displacement(2.5, s, &large);
    EXPECT_FALSE(small.warning);
    EXPECT_TRUE(large.warning);
}

TEST(Displacement, ExactElementsMatchLargeCutoffExponential) {
    const cd gamma{0.8, -0.4};
    const Matrix big = displacement(gamma, FockSpace(80));
    const Matrix block = displacement_block(gamma, 12, 12);
    EXPECT_LT(max_abs(block - big.topLeftCorner(12, 12)), 1e-12);
}

TEST(Squeeze, ZeroIsIdentity) {
    EXPECT_LT(max_abs(squeeze(0.0, FockSpace(10)) - Matrix::Identity(10, 10)), 1e-14);
}

TEST(Squeeze, QuadratureVarianceShrinks) {
    const FockSpace s(40);
    const Vector psi = squeeze(0.3, s) * fock_state(0, s);
    const Matrix x = annihilation(s) + creation(s);
    const double mean = std::real(psi.dot(x * psi));
    const double var = std::real(psi.dot(x * x * psi)) - mean * mean;
    EXPECT_NEAR(var, std::exp(-0.6), 1e-6);  // vacuum variance of a + a† is 1
}

TEST(Squeeze, InverseUndoes) {
    const FockSpace s(40);
    EXPECT_LT(max_abs(squeeze(0.4, s) * squeeze(-0.4, s) - Matrix::Identity(40, 40)), 1e-9);
}

TEST(Bessel, ValuesAtZero) {
    EXPECT_DOUBLE_EQ(bessel_j(0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(bessel_j(2, 0.0), 0.0);
}

TEST(Bessel, DriveArgumentGivesCouplingConstant) {
    const double mu = 146.0 / 185.0;
    const double v = bessel_j(2, mu);
    EXPECT_NEAR(v, oracle::bessel_series(2, mu), 1e-12);
    EXPECT_NEAR(20.0 * v / 2.0, 0.735, 0.005);
}

TEST(Bessel, MatchesPowerSeriesOverRange) {
    for (int n = 0; n <= 8; ++n) {
        for (double x = 0.0; x <= 12.0; x += 0.37) {
            EXPECT_NEAR(bessel_j(n, x), oracle::bessel_series(n, x), 1e-10) << "n=" << n << " x=" << x;
        }
    }
}

TEST(Bessel, NegativeOrderRejectedAndReflected) {
    EXPECT_THROW(bessel_j(-1, 0.5), DomainError);
    EXPECT_NEAR(bessel_j_signed(-3, 0.9), -bessel_j(3, 0.9), 1e-15);
}

TEST(Tensor, IdentitiesCompose) {
    EXPECT_EQ(max_abs(tensor(identity(2), identity(3)) - identity(6)), 0.0);
}

TEST(Tensor, MixedProduct) {
    const QubitSpace q(2);
    const FockSpace s(5);
    const Matrix lhs = tensor(sigma_z(q), identity(5)) * tensor(identity(2), annihilation(s));
    EXPECT_LT(max_abs(lhs - tensor(sigma_z(q), annihilation(s))), 1e-15);
}

TEST(Tensor, TraceFactorizes) {
    std::mt19937_64 rng(11);
    const Matrix a = oracle::random_hermitian(2, rng);
    const Matrix b = oracle::random_hermitian(3, rng);
    EXPECT_NEAR(std::abs(tensor(a, b).trace() - a.trace() * b.trace()), 0.0, 1e-12);
}

TEST(Qubit, PauliConventions) {
    const QubitSpace q(2);
    EXPECT_EQ(sigma_z(q)(0, 0), cd(-1.0));
    EXPECT_EQ(sigma_z(q)(1, 1), cd(1.0));
    EXPECT_LT(max_abs(sigma_x(q) * sigma_y(q) - cd{0.0, 1.0} * sigma_z(q)), 1e-15);
}

TEST(Qubit, ThreeLevelEmbeddingLeavesFEmpty) {
    const QubitSpace q(3);
    for (const Matrix& m : {sigma_x(q), sigma_y(q), sigma_z(q), sigma_minus(q)}) {
        EXPECT_EQ(m.row(2).cwiseAbs().sum(), 0.0);
        EXPECT_EQ(m.col(2).cwiseAbs().sum(), 0.0);
    }
    EXPECT_NEAR(std::abs(ladder_lowering(q)(1, 2)), std::sqrt(2.0), 1e-15);
}

TEST(Parity, SquaresToIdentityAndCommutesWithRabi) {
    const QubitSpace q(2);
    const FockSpace s(20);
    const Matrix p = parity_operator(q, s);
    EXPECT_LT(max_abs(p * p - identity(40)), 1e-12);
    const Matrix h = rabi_hamiltonian(mhz(3.0), mhz(0.3), mhz(0.735), s);
    EXPECT_LT(max_abs(h * p - p * h), 1e-10 * max_abs(h));
}

TEST(Coherent, IsEigenstateOfAnnihilation) {
    const FockSpace s(40);
    const cd alpha{1.6, -2.0};  // |alpha|² ≈ 6.6 ≤ cutoff / 4
    const Vector psi = coherent_state(alpha, s);
    const Vector a_psi = annihilation(s) * psi;
    EXPECT_LT((a_psi - alpha * psi).norm(), 1e-6);
    EXPECT_LT(max_abs(psi - coherent_amplitudes(alpha, 40)), 1e-9);
}

TEST(Determinism, ConstructorsAreBitIdentical) {
    const FockSpace s(25);
    const cd alpha{0.3, 0.9};
    EXPECT_TRUE(displacement(alpha, s) == displacement(alpha, s));
    EXPECT_TRUE(squeeze(0.21, s) == squeeze(0.21, s));
    EXPECT_TRUE(displacement_block(alpha, 9, 7) == displacement_block(alpha, 9, 7));
}

TEST(Expm, MatchesEigendecomposition) {
    std::mt19937_64 rng(3);
    const Matrix h = oracle::random_hermitian(12, rng);
    EXPECT_LT(max_abs(expm(cd{0.0, -0.7} * h) - oracle::unitary_from_eigen(h, 0.7)), 1e-12);
}

TEST(Laguerre, MatchesClosedFormLowOrders) {
    const double x = 1.3;
    const auto l = laguerre_sequence(2, x, 3);
    EXPECT_NEAR(l[0], 1.0, 1e-15);
    EXPECT_NEAR(l[1], 3.0 - x, 1e-14);
    EXPECT_NEAR(l[2], 0.5 * (x * x - 8.0 * x + 12.0), 1e-14);
}

TEST(Density, ChecksAndReductions) {
    std::mt19937_64 rng(5);
    const QubitSpace q(2);
    const FockSpace s(6);
    const Matrix rho = oracle::random_density(12, rng);
    EXPECT_TRUE(check_density(rho).valid);
    const Matrix field = reduce_to_field(rho, q, s);
    const Matrix sum = qubit_block(rho, QubitLevel::g, q, s) + qubit_block(rho, QubitLevel::e, q, s);
    EXPECT_LT(max_abs(field - sum), 1e-15);
    EXPECT_NEAR(std::real(reduce_to_qubit(rho, q, s).trace()), 1.0, 1e-12);
    Matrix bad = rho;
    bad(0, 0) += 0.1;
    EXPECT_FALSE(check_density(bad).valid);
}

TEST(Density, PaddingPreservesEntries) {
    std::mt19937_64 rng(9);
    const Matrix rho = oracle::random_density(5, rng);
    const Matrix big = pad_field(rho, 9);
    EXPECT_EQ(big.rows(), 9);
    EXPECT_EQ(max_abs(big.topLeftCorner(5, 5) - rho), 0.0);
    EXPECT_EQ(big.bottomRightCorner(4, 4).cwiseAbs().sum(), 0.0);
}
