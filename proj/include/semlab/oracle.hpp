#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "semlab/ax.hpp"
#include "semlab/basis.hpp"
#include "semlab/geometry.hpp"

namespace semlab {

/// Dense local stiffness matrix A^e of one element, row-major.
struct LocalMatrix {
  int degree = 0;
  std::int64_t element = 0;
  int n = 0;  // (N+1)^3
  std::vector<double> a;

  double operator()(int row, int col) const { return a[static_cast<std::size_t>(row) * n + col]; }
  double& operator()(int row, int col) { return a[static_cast<std::size_t>(row) * n + col]; }
  double max_abs() const;
};

inline constexpr int kOracleMaxDegree = 6;

/// A^e built column by column by applying the reference kernel to each
/// canonical basis vector. `column_order`, when non-empty, is the order in
/// which columns are probed (a permutation of 0..n-1). Rejects N > 6.
LocalMatrix assemble_local(std::int64_t e, const GeomFactors& g, const SpectralBasis& basis,
                           std::span<const int> column_order = {});

/// A^e from the quadrature sum sum_q sum_ab (d_a l_m)(q) G_ab(q) (d_b l_n)(q),
/// sharing nothing with the kernels beyond the derivative matrix. Rejects N > 6.
LocalMatrix assemble_local_quadrature(std::int64_t e, const GeomFactors& g,
                                      const SpectralBasis& basis);

std::vector<double> dense_matvec(const LocalMatrix& a, std::span<const double> u);

/// Applies the per-element dense matrices to a whole field.
ElementField oracle_apply(std::span<const LocalMatrix> matrices, const ElementField& u);

/// max |a - b| / max |b|, with the denominator floored at the smallest
/// positive double.
double relative_max_error(std::span<const double> a, std::span<const double> b);

struct VariantError {
  KernelVariant variant;
  double max_rel_error = 0.0;
};

struct VerifyReport {
  int degree = 0;
  std::int64_t elements = 0;
  double deformation = 0.0;
  int fields = 0;
  std::vector<VariantError> variants;
  double quadrature_vs_probe = 0.0;  // only for N <= 3, else 0
  double max_rel_error() const;
};

struct VerifyOptions {
  int degree = 3;
  std::array<int, 3> extents{2, 2, 2};
  double deformation = 0.1;
  int fields = 100;
  std::uint64_t seed = 42;
  int threads = 0;
};

/// Runs every legal kernel variant on `fields` random inputs and compares
/// against the dense oracle. Random fields are uniform in [-1, 1].
VerifyReport verify_variants(const VerifyOptions& options);

}  // namespace semlab
