#include "semlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace semlab {

namespace {

void check_degree(int degree) {
  if (degree > kOracleMaxDegree)
    throw std::invalid_argument("oracle: N = " + std::to_string(degree) +
                                " exceeds the dense-assembly limit of 6");
}

}  // namespace

double LocalMatrix::max_abs() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

LocalMatrix assemble_local(std::int64_t e, const GeomFactors& g, const SpectralBasis& basis,
                           std::span<const int> column_order) {
  check_degree(basis.degree());
  if (g.degree != basis.degree()) throw std::invalid_argument("assemble_local: degree mismatch");
  const auto single = g.element(e);
  const int n = static_cast<int>(single.dofs_per_element());

  std::vector<int> order(n);
  if (column_order.empty()) {
    std::iota(order.begin(), order.end(), 0);
  } else {
    if (static_cast<int>(column_order.size()) != n)
      throw std::invalid_argument("assemble_local: column order has wrong length");
    order.assign(column_order.begin(), column_order.end());
  }

  LocalMatrix out{basis.degree(), e, n, std::vector<double>(static_cast<std::size_t>(n) * n)};
  auto probe = ElementField::zeros(basis.degree(), 1);
  for (int col : order) {
    std::fill(probe.values.begin(), probe.values.end(), 0.0);
    probe.values.at(col) = 1.0;
    const auto w = ax_apply(KernelVariant::reference(), probe, single, basis);
    for (int row = 0; row < n; ++row) out(row, col) = w.values[row];
  }
  return out;
}

LocalMatrix assemble_local_quadrature(std::int64_t e, const GeomFactors& g,
                                      const SpectralBasis& basis) {
  check_degree(basis.degree());
  if (g.degree != basis.degree())
    throw std::invalid_argument("assemble_local_quadrature: degree mismatch");
  const int nx = basis.num_points();
  const int n = nx * nx * nx;
  const auto& d = basis.deriv();
  const auto off = e * g.dofs_per_element();

  // grad[q][a][m]: derivative along reference axis a of basis function m at node q.
  auto gradient = [&](int q, int a, int m) {
    const int qi = q % nx, qj = (q / nx) % nx, qk = q / (nx * nx);
    const int mi = m % nx, mj = (m / nx) % nx, mk = m / (nx * nx);
    switch (a) {
      case 0: return (qj == mj && qk == mk) ? d(qi, mi) : 0.0;
      case 1: return (qi == mi && qk == mk) ? d(qj, mj) : 0.0;
      default: return (qi == mi && qj == mj) ? d(qk, mk) : 0.0;
    }
  };

  LocalMatrix out{basis.degree(), e, n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int q = 0; q < n; ++q) {
    const double gq[3][3] = {
        {g.g[kG11][off + q], g.g[kG12][off + q], g.g[kG13][off + q]},
        {g.g[kG12][off + q], g.g[kG22][off + q], g.g[kG23][off + q]},
        {g.g[kG13][off + q], g.g[kG23][off + q], g.g[kG33][off + q]},
    };
    for (int m = 0; m < n; ++m) {
      const double gm[3] = {gradient(q, 0, m), gradient(q, 1, m), gradient(q, 2, m)};
      if (gm[0] == 0.0 && gm[1] == 0.0 && gm[2] == 0.0) continue;
      for (int col = 0; col < n; ++col) {
        const double gc[3] = {gradient(q, 0, col), gradient(q, 1, col), gradient(q, 2, col)};
        double sum = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) sum += gm[a] * gq[a][b] * gc[b];
        out(m, col) += sum;
      }
    }
  }
  return out;
}

std::vector<double> dense_matvec(const LocalMatrix& a, std::span<const double> u) {
  if (static_cast<int>(u.size()) != a.n)
    throw std::invalid_argument("dense_matvec: dimension mismatch");
  std::vector<double> out(a.n, 0.0);
  for (int row = 0; row < a.n; ++row) {
    double s = 0.0;
    for (int col = 0; col < a.n; ++col) s += a(row, col) * u[col];
    out[row] = s;
  }
  return out;
}

ElementField oracle_apply(std::span<const LocalMatrix> matrices, const ElementField& u) {
  if (static_cast<std::int64_t>(matrices.size()) != u.elements)
    throw std::invalid_argument("oracle_apply: one matrix per element required");
  auto w = ElementField::zeros(u.degree, u.elements);
  for (std::int64_t e = 0; e < u.elements; ++e) {
    const auto r = dense_matvec(matrices[e], u.element(e));
    std::copy(r.begin(), r.end(), w.element(e).begin());
  }
  return w;
}

double relative_max_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_max_error: size mismatch");
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / std::max(scale, std::numeric_limits<double>::min());
}

double VerifyReport::max_rel_error() const {
  double m = quadrature_vs_probe;
  for (const auto& v : variants) m = std::max(m, v.max_rel_error);
  return m;
}

VerifyReport verify_variants(const VerifyOptions& options) {
  const auto basis = build_basis(options.degree);
  check_degree(options.degree);
  const auto mesh = build_box_mesh(options.extents, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0},
                                   options.deformation);
  const auto g = build_geom_factors(mesh, basis);

  std::vector<LocalMatrix> matrices;
  for (std::int64_t e = 0; e < g.elements; ++e) matrices.push_back(assemble_local(e, g, basis));

  VerifyReport report{options.degree, g.elements, options.deformation, options.fields, {}, 0.0};
  if (options.degree <= 3)
    for (std::int64_t e = 0; e < g.elements; ++e) {
      const auto quad = assemble_local_quadrature(e, g, basis);
      report.quadrature_vs_probe =
          std::max(report.quadrature_vs_probe, relative_max_error(quad.a, matrices[e].a));
    }

  const auto variants = variants_for_degree(options.degree);
  for (const auto& v : variants) report.variants.push_back({v, 0.0});

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto u = ElementField::zeros(options.degree, g.elements);
  for (int f = 0; f < options.fields; ++f) {
    for (auto& x : u.values) x = dist(rng);
    const auto expected = oracle_apply(matrices, u);
    for (auto& entry : report.variants) {
      const auto w = ax_apply(entry.variant, u, g, basis, nullptr, options.threads);
      entry.max_rel_error =
          std::max(entry.max_rel_error, relative_max_error(w.values, expected.values));
    }
  }
  return report;
}

}  // namespace semlab
