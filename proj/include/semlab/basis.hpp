#pragma once

#include <span>
#include <vector>

namespace semlab {

struct LegendreValue {
  double value;
  double derivative;
};

/// L_n(x) and L'_n(x) by the three-term recurrence. Throws std::invalid_argument
/// for n < 0 or x outside [-1, 1].
LegendreValue legendre(int n, double x);

/// Square nodal derivative operator, D(i, j) = l'_j(xi_i), row-major.
///
/// The flat accessors follow the Nekbone/Ax naming: `dxt()[l + i*nx]` is
/// D(i, l) and `dx()[l + i*nx]` is D(l, i), so kernels can be written with
/// the same index expressions as the original Fortran-ordered code.
class DerivativeMatrix {
 public:
  DerivativeMatrix() = default;
  DerivativeMatrix(int nx, std::vector<double> row_major);

  int size() const { return nx_; }
  double operator()(int i, int j) const { return d_[i * nx_ + j]; }

  std::span<const double> dxt() const { return d_; }
  std::span<const double> dx() const { return dt_; }

  /// Embeds D in an (nx + p)^2 matrix with zero extra rows and columns.
  DerivativeMatrix padded(int p) const;

 private:
  int nx_ = 0;
  std::vector<double> d_;
  std::vector<double> dt_;
};

/// Gauss-Lobatto-Legendre points, weights and derivative matrix for degree N.
/// Immutable after construction.
class SpectralBasis {
 public:
  static constexpr int kMaxDegree = 31;

  int degree() const { return degree_; }
  int num_points() const { return degree_ + 1; }
  std::span<const double> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  const DerivativeMatrix& deriv() const { return deriv_; }

 private:
  friend SpectralBasis build_basis(int degree);
  int degree_ = 0;
  std::vector<double> points_;
  std::vector<double> weights_;
  DerivativeMatrix deriv_;
};

/// Throws std::invalid_argument for N outside [1, 31] and std::runtime_error
/// when Newton iteration fails to converge.
SpectralBasis build_basis(int degree);

}  // namespace semlab
