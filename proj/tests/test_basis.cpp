#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "semlab/basis.hpp"

namespace semlab {
namespace {

TEST(Legendre, LowOrderValues) {
  const auto l2 = legendre(2, 0.5);
  EXPECT_DOUBLE_EQ(l2.value, -0.125);
  EXPECT_DOUBLE_EQ(l2.derivative, 1.5);

  const auto l0 = legendre(0, 0.3);
  EXPECT_DOUBLE_EQ(l0.value, 1.0);
  EXPECT_DOUBLE_EQ(l0.derivative, 0.0);

  // L_3 = (5x^3 - 3x)/2
  const double x = -0.7;
  const auto l3 = legendre(3, x);
  EXPECT_NEAR(l3.value, 0.5 * (5 * x * x * x - 3 * x), 1e-15);
  EXPECT_NEAR(l3.derivative, 0.5 * (15 * x * x - 3), 1e-14);
}

TEST(Legendre, EndpointsAndErrors) {
  for (int n = 0; n <= 20; ++n) {
    EXPECT_NEAR(legendre(n, 1.0).value, 1.0, 1e-14);
    EXPECT_NEAR(legendre(n, -1.0).value, n % 2 ? -1.0 : 1.0, 1e-14);
    // L_n'(1) = n(n+1)/2
    EXPECT_NEAR(legendre(n, 1.0).derivative, 0.5 * n * (n + 1), 1e-10);
  }
  EXPECT_THROW(legendre(-1, 0.0), std::invalid_argument);
  EXPECT_THROW(legendre(3, 1.5), std::invalid_argument);
}

TEST(Basis, DegreeTwoWeights) {
  const auto b = build_basis(2);
  ASSERT_EQ(b.num_points(), 3);
  EXPECT_NEAR(b.points()[0], -1.0, 1e-15);
  EXPECT_NEAR(b.points()[1], 0.0, 1e-15);
  EXPECT_NEAR(b.points()[2], 1.0, 1e-15);
  EXPECT_NEAR(b.weights()[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.weights()[1], 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.weights()[2], 1.0 / 3.0, 1e-15);
}

TEST(Basis, DegreeOne) {
  const auto b = build_basis(1);
  EXPECT_DOUBLE_EQ(b.weights()[0], 1.0);
  EXPECT_DOUBLE_EQ(b.weights()[1], 1.0);
  EXPECT_DOUBLE_EQ(b.deriv()(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(b.deriv()(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(b.deriv()(1, 0), -0.5);
  EXPECT_DOUBLE_EQ(b.deriv()(1, 1), 0.5);
}

TEST(Basis, RejectsBadDegree) {
  EXPECT_THROW(build_basis(0), std::invalid_argument);
  EXPECT_THROW(build_basis(-3), std::invalid_argument);
  EXPECT_THROW(build_basis(SpectralBasis::kMaxDegree + 1), std::invalid_argument);
  EXPECT_NO_THROW(build_basis(SpectralBasis::kMaxDegree));
}

class BasisByDegree : public ::testing::TestWithParam<int> {};

TEST_P(BasisByDegree, PointsSortedSymmetricAndEndpoints) {
  const int n = GetParam();
  const auto b = build_basis(n);
  const auto x = b.points();
  EXPECT_EQ(x.front(), -1.0);
  EXPECT_EQ(x.back(), 1.0);
  for (int i = 0; i + 1 < b.num_points(); ++i) EXPECT_LT(x[i], x[i + 1]);
  for (int i = 0; i < b.num_points(); ++i) {
    EXPECT_EQ(x[i], -x[n - i]);
    EXPECT_EQ(b.weights()[i], b.weights()[n - i]);
    EXPECT_GT(b.weights()[i], 0.0);
  }
  // interior points are roots of L_N'
  for (int i = 1; i < n; ++i) EXPECT_NEAR(legendre(n, x[i]).derivative, 0.0, 1e-11 * n * n);
}

TEST_P(BasisByDegree, QuadratureExactToDegree2NMinus1) {
  const int n = GetParam();
  const auto b = build_basis(n);
  for (int k = 0; k <= 2 * n - 1; ++k) {
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) sum += b.weights()[i] * std::pow(b.points()[i], k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(sum, exact, 1e-13) << "k=" << k;
  }
}

TEST_P(BasisByDegree, DerivativeExactOnMonomials) {
  const int n = GetParam();
  const auto b = build_basis(n);
  const auto& d = b.deriv();
  for (int k = 0; k <= n; ++k) {
    for (int i = 0; i <= n; ++i) {
      double s = 0.0;
      for (int j = 0; j <= n; ++j) s += d(i, j) * std::pow(b.points()[j], k);
      const double exact = k == 0 ? 0.0 : k * std::pow(b.points()[i], k - 1);
      EXPECT_NEAR(s, exact, 5e-12 * (n + 1) * (n + 1)) << "k=" << k << " i=" << i;
    }
  }
}

TEST_P(BasisByDegree, CornerEntriesAndRowSums) {
  const int n = GetParam();
  const auto b = build_basis(n);
  const auto& d = b.deriv();
  EXPECT_NEAR(d(0, 0), -0.25 * n * (n + 1), 1e-12 * n * n);
  EXPECT_NEAR(d(n, n), 0.25 * n * (n + 1), 1e-12 * n * n);
  for (int i = 0; i <= n; ++i) {
    double row = 0.0;
    for (int j = 0; j <= n; ++j) row += d(i, j);
    EXPECT_NEAR(row, 0.0, 1e-12 * n * n);
    // centro-antisymmetry D(i,j) = -D(N-i, N-j)
    for (int j = 0; j <= n; ++j) EXPECT_NEAR(d(i, j), -d(n - i, n - j), 1e-12 * n * n);
  }
}

INSTANTIATE_TEST_SUITE_P(Degrees, BasisByDegree, ::testing::Range(1, 16));

TEST(Basis, DerivativeOfCubicAtDegreeSeven) {
  const auto b = build_basis(7);
  for (int i = 0; i <= 7; ++i) {
    double s = 0.0;
    for (int j = 0; j <= 7; ++j) s += b.deriv()(i, j) * std::pow(b.points()[j], 3);
    EXPECT_NEAR(s, 3.0 * b.points()[i] * b.points()[i], 1e-12);
  }
}

TEST(DerivativeMatrix, FlatLayouts) {
  const auto b = build_basis(4);
  const auto& d = b.deriv();
  const int nx = d.size();
  for (int i = 0; i < nx; ++i)
    for (int l = 0; l < nx; ++l) {
      EXPECT_EQ(d.dxt()[l + i * nx], d(i, l));
      EXPECT_EQ(d.dx()[l + i * nx], d(l, i));
    }
}

TEST(DerivativeMatrix, PaddedEmbedsWithZeros) {
  const auto b = build_basis(3);
  const auto p = b.deriv().padded(2);
  ASSERT_EQ(p.size(), 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      EXPECT_EQ(p(i, j), (i < 4 && j < 4) ? b.deriv()(i, j) : 0.0);
}

}  // namespace
}  // namespace semlab
