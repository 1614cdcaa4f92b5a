#include <gtest/gtest.h>

#include <cmath>

#include "raddich/spectral.hpp"
#include "support.hpp"

using namespace raddich;

TEST(Potential, RejectsBadShapes) {
  EXPECT_THROW(PotentialMatrix(MatrixXc(2, 3)), DomainError);
  MatrixXc m = MatrixXc::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(PotentialMatrix{m}, DomainError);
}

TEST(Eigen, IdentitySpectrum) {
  auto eig = eigendecompose(PotentialMatrix::identity(2));
  ASSERT_EQ(eig.dim(), 2);
  for (cplx l : eig.lambdas) EXPECT_EQ(l, cplx(1.0));
  EXPECT_NEAR(eig.cond, 1.0, 1e-14);
  auto rep = check_hypotheses(eig);
  EXPECT_TRUE(rep.h1);
  EXPECT_TRUE(rep.h2);
  EXPECT_DOUBLE_EQ(rep.gamma_lower, 1.0);
}

TEST(Eigen, SortedByRealThenImag) {
  auto eig = eigendecompose(PotentialMatrix::diagonal({cplx(2, 0), cplx(1, 1), cplx(1, -1)}));
  EXPECT_EQ(eig.lambdas[0], cplx(1, -1));
  EXPECT_EQ(eig.lambdas[1], cplx(1, 1));
  EXPECT_EQ(eig.lambdas[2], cplx(2, 0));
}

TEST(Eigen, ReconstructsRandomPotentials) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    CounterRng rng(11, 0, i);
    const int d = 1 + static_cast<int>(i % 4);
    auto V = testsupport::random_h2_potential(rng, d);
    auto eig = eigendecompose(V);
    MatrixXc L = MatrixXc::Zero(d, d);
    for (int l = 0; l < d; ++l) L(l, l) = eig.lambdas[static_cast<std::size_t>(l)];
    const double err = (eig.R * L * eig.R_inv - V.entries()).norm();
    EXPECT_LT(err, 1e-10 * std::max(1.0, V.entries().norm()) * eig.cond);
    EXPECT_LT((eig.R * eig.R_inv - MatrixXc::Identity(d, d)).norm(), 1e-10 * eig.cond);
    for (int c = 0; c < d; ++c) EXPECT_NEAR(eig.R.col(c).norm(), 1.0, 1e-12);
  }
}

TEST(Eigen, DeterministicColumns) {
  MatrixXc m(2, 2);
  m << 2.0, 1.0, 1.0, 3.0;
  auto a = eigendecompose(PotentialMatrix(m));
  auto b = eigendecompose(PotentialMatrix(m));
  EXPECT_EQ(a.R, b.R);
  EXPECT_EQ(a.lambdas, b.lambdas);
}

TEST(Eigen, JordanBlockIsNotDiagonalizable) {
  MatrixXc m(2, 2);
  m << 1.0, 1.0, 0.0, 1.0;
  EXPECT_THROW(eigendecompose(PotentialMatrix(m)), NonDiagonalizable);
  auto rep = check_hypotheses(PotentialMatrix(m));
  EXPECT_FALSE(rep.diagonalizable);
  EXPECT_FALSE(rep.h2);
  EXPECT_TRUE(rep.h1);
}

TEST(Hypotheses, NegativeAxisFailsH1) {
  auto rep = check_hypotheses(PotentialMatrix::diagonal({-1.0, 2.0}));
  EXPECT_FALSE(rep.h1);
  EXPECT_FALSE(rep.h2);
  ASSERT_EQ(rep.offending_eigenvalues.size(), 1u);
  EXPECT_EQ(rep.offending_eigenvalues[0], cplx(-1.0));
  EXPECT_EQ(rep.gamma_lower, 0.0);
  EXPECT_FALSE(check_hypotheses(PotentialMatrix::diagonal({0.0})).h1);
}

TEST(Hypotheses, ComplexPairPasses) {
  MatrixXc m(2, 2);
  m << 0.0, 1.0, -1.0, 0.0;  // ±i
  auto rep = check_hypotheses(PotentialMatrix(m));
  EXPECT_TRUE(rep.h2);
  EXPECT_NEAR(rep.gamma_lower, 1.0, 1e-13);
}

TEST(Hypotheses, GammaLowerBoundsSymbolModulus) {
  // Γ is the min over ℓ of sqrt(|Im λ|) (or sqrt(Re λ) for real λ).
  auto rep = check_hypotheses(PotentialMatrix::diagonal({cplx(3, 0.25), cplx(0.5, 0)}));
  EXPECT_NEAR(rep.gamma_lower, 0.5, 1e-15);
  rep = check_hypotheses(PotentialMatrix::diagonal({cplx(9, 0), cplx(-2, 4)}));
  EXPECT_NEAR(rep.gamma_lower, 2.0, 1e-15);
}

TEST(Eigen, ConditionCap) {
  MatrixXc m(2, 2);
  m << 1.0, 1e8, 0.0, 1.0 + 1e-8;
  EXPECT_THROW(eigendecompose(PotentialMatrix(m), 1e6), NonDiagonalizable);
}
