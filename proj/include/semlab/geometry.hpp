#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "semlab/basis.hpp"

namespace semlab {

using Point3 = std::array<double, 3>;

/// Axis-aligned box split into Ex x Ey x Ez hexahedra, optionally warped by a
/// smooth interior perturbation that leaves the boundary fixed.
///
/// Element e = ex + Ex * (ey + Ey * ez).
struct BoxMesh {
  std::array<int, 3> extents{1, 1, 1};
  Point3 lower{0.0, 0.0, 0.0};
  Point3 upper{1.0, 1.0, 1.0};
  double deformation = 0.0;

  std::int64_t num_elements() const {
    return std::int64_t{extents[0]} * extents[1] * extents[2];
  }
  std::array<int, 3> element_coords(std::int64_t e) const;
  /// Undeformed trilinear corners, lexicographic (x fastest).
  std::array<Point3, 8> element_corners(std::int64_t e) const;
  /// Applies the deformation to an undeformed point.
  Point3 deform(const Point3& p) const;
  /// Physical position of a point given by reference coordinates r in [-1,1]^3.
  Point3 map(std::int64_t e, const Point3& r) const;
};

/// Throws std::invalid_argument on non-positive extents or lengths, or
/// deformation outside [0, 0.2).
BoxMesh build_box_mesh(std::array<int, 3> extents, Point3 lower, Point3 upper,
                       double deformation = 0.0);

enum GeomComponent : int { kG11 = 0, kG12, kG13, kG22, kG23, kG33 };

/// Six unique entries of rho_i rho_j rho_k |J| (dr/dx)(dr/dx)^T per DOF, each
/// stored as its own element-major array (DOF index i fastest). `mass` holds the
/// diagonal GLL mass rho_i rho_j rho_k |J|.
struct GeomFactors {
  int degree = 0;
  std::int64_t elements = 0;
  std::array<std::vector<double>, 6> g;
  std::vector<double> mass;

  std::int64_t dofs_per_element() const {
    const std::int64_t nx = degree + 1;
    return nx * nx * nx;
  }
  std::int64_t size() const { return elements * dofs_per_element(); }

  /// Copy of a single element as an E = 1 factor set.
  GeomFactors element(std::int64_t e) const;
  static GeomFactors zeros(int degree, std::int64_t elements);
};

/// Physical coordinates at every GLL node, element-major.
struct NodalCoordinates {
  std::vector<double> x, y, z;
};

NodalCoordinates nodal_coordinates(const BoxMesh& mesh, const SpectralBasis& basis);

/// Throws std::runtime_error naming the element when a Jacobian determinant
/// is non-positive.
GeomFactors build_geom_factors(const BoxMesh& mesh, const SpectralBasis& basis);

}  // namespace semlab
