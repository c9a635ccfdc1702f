#include "semlab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace semlab {

namespace {

constexpr double kMaxDeformation = 0.2;

// Undeformed coordinate along one axis of a node with reference coordinate r.
double axis_coordinate(double lo, double hi, int count, int index, double r) {
  return lo + (hi - lo) * (index + 0.5 * (r + 1.0)) / count;
}

}  // namespace

std::array<int, 3> BoxMesh::element_coords(std::int64_t e) const {
  const auto ex = static_cast<int>(e % extents[0]);
  const auto rest = e / extents[0];
  return {ex, static_cast<int>(rest % extents[1]), static_cast<int>(rest / extents[1])};
}

std::array<Point3, 8> BoxMesh::element_corners(std::int64_t e) const {
  const auto c = element_coords(e);
  std::array<Point3, 8> out{};
  for (int v = 0; v < 8; ++v) {
    const Point3 r{(v & 1) ? 1.0 : -1.0, (v & 2) ? 1.0 : -1.0, (v & 4) ? 1.0 : -1.0};
    for (int a = 0; a < 3; ++a)
      out[v][a] = axis_coordinate(lower[a], upper[a], extents[a], c[a], r[a]);
  }
  return out;
}

Point3 BoxMesh::deform(const Point3& p) const {
  if (deformation == 0.0) return p;
  using std::numbers::pi;
  Point3 s{};
  Point3 len{};
  for (int a = 0; a < 3; ++a) {
    len[a] = upper[a] - lower[a];
    s[a] = (p[a] - lower[a]) / len[a];
  }
  // Each displacement vanishes on the whole boundary of the box.
  const double sx = std::sin(pi * s[0]), sy = std::sin(pi * s[1]), sz = std::sin(pi * s[2]);
  const double amp = deformation / (2.0 * pi);
  return {p[0] + amp * len[0] * std::sin(2.0 * pi * s[0]) * sy * sz,
          p[1] + amp * len[1] * sx * std::sin(2.0 * pi * s[1]) * sz,
          p[2] + amp * len[2] * sx * sy * std::sin(2.0 * pi * s[2])};
}

Point3 BoxMesh::map(std::int64_t e, const Point3& r) const {
  const auto c = element_coords(e);
  Point3 p{};
  for (int a = 0; a < 3; ++a) p[a] = axis_coordinate(lower[a], upper[a], extents[a], c[a], r[a]);
  return deform(p);
}

BoxMesh build_box_mesh(std::array<int, 3> extents, Point3 lower, Point3 upper,
                       double deformation) {
  for (int a = 0; a < 3; ++a) {
    if (extents[a] < 1) throw std::invalid_argument("build_box_mesh: extents must be >= 1");
    if (!(upper[a] - lower[a] > 0.0))
      throw std::invalid_argument("build_box_mesh: domain lengths must be positive");
  }
  if (!(deformation >= 0.0 && deformation < kMaxDeformation))
    throw std::invalid_argument("build_box_mesh: deformation must lie in [0, 0.2)");
  return BoxMesh{extents, lower, upper, deformation};
}

GeomFactors GeomFactors::zeros(int degree, std::int64_t elements) {
  GeomFactors f;
  f.degree = degree;
  f.elements = elements;
  for (auto& a : f.g) a.assign(f.size(), 0.0);
  f.mass.assign(f.size(), 0.0);
  return f;
}

GeomFactors GeomFactors::element(std::int64_t e) const {
  if (e < 0 || e >= elements) throw std::out_of_range("GeomFactors::element");
  GeomFactors f = zeros(degree, 1);
  const auto n = dofs_per_element();
  for (int c = 0; c < 6; ++c)
    std::copy_n(g[c].begin() + e * n, n, f.g[c].begin());
  std::copy_n(mass.begin() + e * n, n, f.mass.begin());
  return f;
}

NodalCoordinates nodal_coordinates(const BoxMesh& mesh, const SpectralBasis& basis) {
  const int nx = basis.num_points();
  const auto xi = basis.points();
  const std::int64_t n3 = std::int64_t{nx} * nx * nx;
  const std::int64_t total = mesh.num_elements() * n3;
  NodalCoordinates out{std::vector<double>(total), std::vector<double>(total),
                       std::vector<double>(total)};
#pragma omp parallel for schedule(static)
  for (std::int64_t e = 0; e < mesh.num_elements(); ++e)
    for (int k = 0; k < nx; ++k)
      for (int j = 0; j < nx; ++j)
        for (int i = 0; i < nx; ++i) {
          const auto p = mesh.map(e, {xi[i], xi[j], xi[k]});
          const auto idx = e * n3 + i + nx * (j + nx * k);
          out.x[idx] = p[0];
          out.y[idx] = p[1];
          out.z[idx] = p[2];
        }
  return out;
}

GeomFactors build_geom_factors(const BoxMesh& mesh, const SpectralBasis& basis) {
  const int nx = basis.num_points();
  const auto xi = basis.points();
  const auto w = basis.weights();
  const auto& d = basis.deriv();
  const std::int64_t n3 = std::int64_t{nx} * nx * nx;
  const std::int64_t num_elements = mesh.num_elements();

  Point3 half_h{};
  for (int a = 0; a < 3; ++a)
    half_h[a] = 0.5 * (mesh.upper[a] - mesh.lower[a]) / mesh.extents[a];

  GeomFactors f = GeomFactors::zeros(basis.degree(), num_elements);
  std::int64_t bad_element = -1;

#pragma omp parallel
  {
    // Displacement of the warped mapping relative to the affine one.
    std::array<std::vector<double>, 3> disp;
    for (auto& v : disp) v.assign(n3, 0.0);

#pragma omp for schedule(static)
    for (std::int64_t e = 0; e < num_elements; ++e) {
      const auto c = mesh.element_coords(e);
      if (mesh.deformation != 0.0) {
        for (int k = 0; k < nx; ++k)
          for (int j = 0; j < nx; ++j)
            for (int i = 0; i < nx; ++i) {
              const Point3 r{xi[i], xi[j], xi[k]};
              Point3 p{};
              for (int a = 0; a < 3; ++a)
                p[a] = axis_coordinate(mesh.lower[a], mesh.upper[a], mesh.extents[a], c[a], r[a]);
              const auto q = mesh.deform(p);
              const auto idx = i + nx * (j + nx * k);
              for (int a = 0; a < 3; ++a) disp[a][idx] = q[a] - p[a];
            }
      }

      for (int k = 0; k < nx; ++k)
        for (int j = 0; j < nx; ++j)
          for (int i = 0; i < nx; ++i) {
            const auto idx = i + nx * (j + nx * k);
            // jac[m][a] = d x_m / d r_a
            double jac[3][3] = {{half_h[0], 0.0, 0.0}, {0.0, half_h[1], 0.0}, {0.0, 0.0, half_h[2]}};
            if (mesh.deformation != 0.0) {
              for (int m = 0; m < 3; ++m) {
                double dr = 0.0, ds = 0.0, dt = 0.0;
                for (int l = 0; l < nx; ++l) {
                  dr += d(i, l) * disp[m][l + nx * (j + nx * k)];
                  ds += d(j, l) * disp[m][i + nx * (l + nx * k)];
                  dt += d(k, l) * disp[m][i + nx * (j + nx * l)];
                }
                jac[m][0] += dr;
                jac[m][1] += ds;
                jac[m][2] += dt;
              }
            }
            // adj[a][m] = cofactor transpose, so (dr_a/dx_m) = adj[a][m] / det.
            double adj[3][3];
            adj[0][0] = jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1];
            adj[0][1] = jac[0][2] * jac[2][1] - jac[0][1] * jac[2][2];
            adj[0][2] = jac[0][1] * jac[1][2] - jac[0][2] * jac[1][1];
            adj[1][0] = jac[1][2] * jac[2][0] - jac[1][0] * jac[2][2];
            adj[1][1] = jac[0][0] * jac[2][2] - jac[0][2] * jac[2][0];
            adj[1][2] = jac[0][2] * jac[1][0] - jac[0][0] * jac[1][2];
            adj[2][0] = jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0];
            adj[2][1] = jac[0][1] * jac[2][0] - jac[0][0] * jac[2][1];
            adj[2][2] = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            const double det = jac[0][0] * adj[0][0] + jac[0][1] * adj[1][0] + jac[0][2] * adj[2][0];
            if (!(det > 0.0)) {
#pragma omp critical
              if (bad_element < 0 || e < bad_element) bad_element = e;
              continue;
            }
            const double weight = w[i] * w[j] * w[k];
            const double scale = weight / det;
            auto metric = [&](int a, int b) {
              return scale * (adj[a][0] * adj[b][0] + adj[a][1] * adj[b][1] + adj[a][2] * adj[b][2]);
            };
            const auto gi = e * n3 + idx;
            f.g[kG11][gi] = metric(0, 0);
            f.g[kG12][gi] = metric(0, 1);
            f.g[kG13][gi] = metric(0, 2);
            f.g[kG22][gi] = metric(1, 1);
            f.g[kG23][gi] = metric(1, 2);
            f.g[kG33][gi] = metric(2, 2);
            f.mass[gi] = weight * det;
          }
    }
  }
  if (bad_element >= 0)
    throw std::runtime_error("build_geom_factors: non-positive Jacobian in element " +
                             std::to_string(bad_element));
  return f;
}

}  // namespace semlab
