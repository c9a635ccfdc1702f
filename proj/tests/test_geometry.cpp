#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "semlab/geometry.hpp"

namespace semlab {
namespace {

TEST(BoxMesh, ElementNumberingAndCorners) {
  const auto mesh = build_box_mesh({3, 2, 2}, {0, 0, 0}, {3, 2, 2});
  EXPECT_EQ(mesh.num_elements(), 12);
  EXPECT_EQ(mesh.element_coords(0), (std::array<int, 3>{0, 0, 0}));
  EXPECT_EQ(mesh.element_coords(1), (std::array<int, 3>{1, 0, 0}));
  EXPECT_EQ(mesh.element_coords(3), (std::array<int, 3>{0, 1, 0}));
  EXPECT_EQ(mesh.element_coords(11), (std::array<int, 3>{2, 1, 1}));

  const auto c = mesh.element_corners(11);
  EXPECT_EQ(c[0], (Point3{2, 1, 1}));
  EXPECT_EQ(c[7], (Point3{3, 2, 2}));
}

TEST(BoxMesh, RejectsBadInput) {
  EXPECT_THROW(build_box_mesh({0, 1, 1}, {0, 0, 0}, {1, 1, 1}), std::invalid_argument);
  EXPECT_THROW(build_box_mesh({1, 1, 1}, {0, 0, 0}, {1, 0, 1}), std::invalid_argument);
  EXPECT_THROW(build_box_mesh({1, 1, 1}, {0, 0, 0}, {1, 1, 1}, -0.01), std::invalid_argument);
  EXPECT_THROW(build_box_mesh({1, 1, 1}, {0, 0, 0}, {1, 1, 1}, 0.2), std::invalid_argument);
}

TEST(BoxMesh, DeformationFixesBoundary) {
  const auto mesh = build_box_mesh({2, 2, 2}, {0, 0, 0}, {1, 1, 1}, 0.15);
  for (double s : {0.0, 0.3, 0.71, 1.0})
    for (double t : {0.0, 0.45, 1.0}) {
      for (const Point3& p : {Point3{0, s, t}, Point3{1, s, t}, Point3{s, 0, t}, Point3{s, 1, t},
                              Point3{s, t, 0}, Point3{s, t, 1}}) {
        const auto q = mesh.deform(p);
        for (int a = 0; a < 3; ++a) EXPECT_NEAR(q[a], p[a], 1e-15);
      }
    }
  const auto mid = mesh.deform({0.5, 0.5, 0.5});
  const auto moved = mesh.deform({0.25, 0.5, 0.5});
  EXPECT_NE(moved, (Point3{0.25, 0.5, 0.5}));
  (void)mid;
}

TEST(GeomFactors, AffineCubeHasClosedForm) {
  const int n = 4;
  const auto basis = build_basis(n);
  const auto mesh = build_box_mesh({2, 2, 2}, {0, 0, 0}, {1, 1, 1});
  const auto g = build_geom_factors(mesh, basis);
  const int nx = n + 1;
  ASSERT_EQ(g.size(), 8 * nx * nx * nx);
  const double h = 0.5;
  for (std::int64_t e = 0; e < g.elements; ++e)
    for (int k = 0; k < nx; ++k)
      for (int j = 0; j < nx; ++j)
        for (int i = 0; i < nx; ++i) {
          const auto idx = e * nx * nx * nx + i + nx * (j + nx * k);
          const double w = basis.weights()[i] * basis.weights()[j] * basis.weights()[k];
          EXPECT_NEAR(g.g[kG11][idx], w * h / 2, 1e-15);
          EXPECT_NEAR(g.g[kG22][idx], w * h / 2, 1e-15);
          EXPECT_NEAR(g.g[kG33][idx], w * h / 2, 1e-15);
          EXPECT_EQ(g.g[kG12][idx], 0.0);
          EXPECT_EQ(g.g[kG13][idx], 0.0);
          EXPECT_EQ(g.g[kG23][idx], 0.0);
          EXPECT_NEAR(g.mass[idx], w * h * h * h / 8, 1e-16);
        }
}

TEST(GeomFactors, AnisotropicBox) {
  const auto basis = build_basis(2);
  const auto mesh = build_box_mesh({1, 1, 1}, {0, 0, 0}, {2, 1, 4});
  const auto g = build_geom_factors(mesh, basis);
  // |J| = 1 * 0.5 * 2; G_aa = |J| / (h_a/2)^2
  const double w = basis.weights()[1] * basis.weights()[1] * basis.weights()[1];
  const int centre = 1 + 3 * (1 + 3 * 1);
  EXPECT_NEAR(g.g[kG11][centre], w * 1.0 / 1.0, 1e-14);
  EXPECT_NEAR(g.g[kG22][centre], w * 1.0 / 0.25, 1e-14);
  EXPECT_NEAR(g.g[kG33][centre], w * 1.0 / 4.0, 1e-14);
}

TEST(GeomFactors, DeformedMassIntegratesVolume) {
  const auto basis = build_basis(8);
  const auto mesh = build_box_mesh({2, 2, 2}, {0, 0, 0}, {1, 1, 1}, 0.1);
  const auto g = build_geom_factors(mesh, basis);
  const double volume = std::accumulate(g.mass.begin(), g.mass.end(), 0.0);
  EXPECT_NEAR(volume, 1.0, 1e-6);
  bool off_diagonal = false;
  for (double v : g.g[kG12]) off_diagonal |= std::abs(v) > 1e-6;
  EXPECT_TRUE(off_diagonal);
}

TEST(GeomFactors, PositiveDiagonalAndDeterminant) {
  const auto basis = build_basis(5);
  const auto mesh = build_box_mesh({3, 2, 1}, {0, 0, 0}, {1, 1, 1}, 0.19);
  const auto g = build_geom_factors(mesh, basis);
  for (std::int64_t q = 0; q < g.size(); ++q) {
    EXPECT_GT(g.mass[q], 0.0);
    EXPECT_GT(g.g[kG11][q], 0.0);
    EXPECT_GT(g.g[kG22][q], 0.0);
    EXPECT_GT(g.g[kG33][q], 0.0);
    // each 2x2 principal minor of a positive definite G is positive
    EXPECT_GT(g.g[kG11][q] * g.g[kG22][q] - g.g[kG12][q] * g.g[kG12][q], 0.0);
  }
}

TEST(GeomFactors, ElementSlice) {
  const auto basis = build_basis(2);
  const auto mesh = build_box_mesh({2, 1, 1}, {0, 0, 0}, {1, 1, 1}, 0.1);
  const auto g = build_geom_factors(mesh, basis);
  const auto one = g.element(1);
  ASSERT_EQ(one.elements, 1);
  for (int c = 0; c < 6; ++c)
    for (int q = 0; q < 27; ++q) EXPECT_EQ(one.g[c][q], g.g[c][27 + q]);
  EXPECT_THROW(g.element(2), std::out_of_range);
}

TEST(NodalCoordinates, SharedFaceNodesCoincide) {
  const int n = 3;
  const auto basis = build_basis(n);
  const auto mesh = build_box_mesh({2, 1, 1}, {0, 0, 0}, {1, 1, 1}, 0.1);
  const auto xyz = nodal_coordinates(mesh, basis);
  const int nx = n + 1, n3 = nx * nx * nx;
  for (int k = 0; k < nx; ++k)
    for (int j = 0; j < nx; ++j) {
      const int left = n + nx * (j + nx * k);
      const int right = n3 + 0 + nx * (j + nx * k);
      EXPECT_NEAR(xyz.x[left], xyz.x[right], 1e-15);
      EXPECT_NEAR(xyz.y[left], xyz.y[right], 1e-15);
      EXPECT_NEAR(xyz.z[left], xyz.z[right], 1e-15);
    }
}

}  // namespace
}  // namespace semlab
