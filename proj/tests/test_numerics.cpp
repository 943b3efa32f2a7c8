#include <gtest/gtest.h>

#include <cmath>

#include "delaysync/numerics.hpp"

using namespace dsync;

TEST(EigComplex, ScalarAndRotation) {
    Eigen::MatrixXd one(1, 1);
    one << -3.5;
    const auto e1 = eig_complex(one);
    ASSERT_EQ(e1.size(), 1u);
    EXPECT_EQ(e1[0], Complex(-3.5, 0.0));

    Eigen::Matrix2d rot;
    rot << 0, -1, 1, 0;
    const auto e2 = eig_complex(rot);
    ASSERT_EQ(e2.size(), 2u);
    EXPECT_NEAR(std::abs(e2[0] - Complex(0, -1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(e2[1] - Complex(0, 1)), 0.0, 1e-15);
}

TEST(EigComplex, TwoByTwoKeepsTinyRootAccurate) {
    // Roots 1e8 and 1e-8: naive formula loses the small one entirely.
    Eigen::Matrix2d m;
    m << 1e8, 1.0, 0.0, 1e-8;
    const auto e = eig_complex(m);
    EXPECT_NEAR(e[0].real(), 1e-8, 1e-22);
    EXPECT_NEAR(e[1].real(), 1e8, 1e-6);
}

TEST(EigComplex, CompanionMatrixRoots) {
    // (z - 1)(z - 2)(z - 3)(z + 1 - 2i)
    const ComplexVector roots = (ComplexVector(4) << 1.0, 2.0, 3.0, Complex(-1, 2)).finished();
    ComplexVector poly = ComplexVector::Zero(5);
    poly(0) = 1.0;
    for (int k = 0; k < 4; ++k) {
        ComplexVector next = ComplexVector::Zero(5);
        for (int i = 0; i <= k; ++i) {
            next(i + 1) += poly(i);
            next(i) -= roots(k) * poly(i);
        }
        poly = next;
    }
    ComplexMatrix c = ComplexMatrix::Zero(4, 4);
    for (int i = 1; i < 4; ++i) c(i, i - 1) = 1.0;
    for (int i = 0; i < 4; ++i) c(i, 3) = -poly(i) / poly(4);
    const auto e = eig_complex(c);
    ASSERT_EQ(e.size(), 4u);
    EXPECT_NEAR(std::abs(e[0] - Complex(-1, 2)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(e[1] - 1.0), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(e[2] - 2.0), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(e[3] - 3.0), 0.0, 1e-10);
}

TEST(EigComplex, RejectsBadInput) {
    EXPECT_THROW(eig_complex(Eigen::MatrixXd(2, 3)), InvalidInput);
    Eigen::MatrixXd nan = Eigen::MatrixXd::Zero(2, 2);
    nan(0, 0) = std::nan("");
    EXPECT_THROW(eig_complex(nan), InvalidInput);
}

TEST(Determinant, MatchesEigenvalueProduct) {
    std::srand(3);
    for (int q = 1; q <= 6; ++q) {
        const ComplexMatrix m = ComplexMatrix::Random(q, q);
        Complex prod = 1.0;
        for (Complex z : eig_complex(m)) prod *= z;
        EXPECT_NEAR(std::abs(det_complex(m) - prod), 0.0, 1e-12 * std::max(1.0, std::abs(prod))) << "q = " << q;
    }
    EXPECT_THROW(det_complex(ComplexMatrix(2, 3)), InvalidInput);
}

TEST(Determinant, JacobiDerivativeMatchesDifference) {
    std::srand(11);
    for (int q : {1, 2, 3, 5}) {
        const ComplexMatrix m = ComplexMatrix::Random(q, q);
        const ComplexMatrix dm = ComplexMatrix::Random(q, q);
        const double h = 1e-6;
        const Complex fd = (det_complex(ComplexMatrix(m + h * dm)) - det_complex(ComplexMatrix(m - h * dm))) / (2.0 * h);
        EXPECT_NEAR(std::abs(det_derivative(m, dm) - fd), 0.0, 1e-8) << "q = " << q;
    }
}

TEST(Newton, FindsCubeRoot) {
    auto f = [](Complex z) { return z * z * z - 1.0; };
    auto df = [](Complex z) { return 3.0 * z * z; };
    const RootResult r = newton_complex(f, df, Complex(-0.4, 0.9));
    ASSERT_TRUE(r.converged);
    EXPECT_LE(r.residual, kRootTolerance);
    EXPECT_NEAR(std::abs(r.root - std::polar(1.0, 2.0 * M_PI / 3.0)), 0.0, 1e-10);

    const RootResult numeric = newton_complex(f, Complex(-0.4, 0.9));
    ASSERT_TRUE(numeric.converged);
    EXPECT_NEAR(std::abs(numeric.root - r.root), 0.0, 1e-9);
}

TEST(Newton, FailureIsReportedNotThrown) {
    auto f = [](Complex z) { return z * z + 1.0; };
    auto df = [](Complex z) { return 2.0 * z; };
    const RootResult r = newton_complex(f, df, Complex(0.0, 0.0));
    EXPECT_FALSE(r.converged);
    EXPECT_GT(r.residual, kRootTolerance);
}

TEST(Minimize, FindsInteriorMinimumAmongSeveral) {
    auto f = [](double x) { return std::cos(3.0 * x) + 0.1 * (x - 1.0) * (x - 1.0); };
    const Minimum m = minimize_1d(f, -4.0, 4.0);
    // Global minimum near x = pi/3 * (2k+1) closest to 1: x ~ 1.047.
    EXPECT_NEAR(m.argmin, 1.0459, 1e-3);
    for (double x = -4.0; x <= 4.0; x += 1e-3) EXPECT_GE(f(x), m.value - 1e-12);
    EXPECT_THROW(minimize_1d(f, 1.0, 1.0), InvalidInput);
}

TEST(Conditioning, NormAndCondition) {
    EXPECT_NEAR(spectral_norm(ComplexMatrix::Identity(3, 3)), 1.0, 1e-15);
    EXPECT_NEAR(condition_number(ComplexMatrix::Identity(3, 3)), 1.0, 1e-15);
    ComplexMatrix singular = ComplexMatrix::Zero(2, 2);
    singular(0, 0) = 1.0;
    EXPECT_TRUE(std::isinf(condition_number(singular)));
}
