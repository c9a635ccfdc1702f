#include "semlab/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace semlab {

namespace {

constexpr double kNewtonTolerance = 1e-14;
constexpr int kNewtonMaxIterations = 100;

// No range check: Newton iterates are allowed to wander slightly.
LegendreValue legendre_unchecked(int n, double x) {
  double p_prev = 1.0;
  double dp_prev = 0.0;
  if (n == 0) return {p_prev, dp_prev};
  double p = x;
  double dp = 1.0;
  for (int k = 2; k <= n; ++k) {
    const double p_next = ((2 * k - 1) * x * p - (k - 1) * p_prev) / k;
    const double dp_next = k * p + x * dp;
    p_prev = p;
    p = p_next;
    dp = dp_next;
  }
  return {p, dp};
}

}  // namespace

LegendreValue legendre(int n, double x) {
  if (n < 0) throw std::invalid_argument("legendre: negative order");
  if (!(x >= -1.0 && x <= 1.0))
    throw std::invalid_argument("legendre: x outside [-1, 1]");
  return legendre_unchecked(n, x);
}

DerivativeMatrix::DerivativeMatrix(int nx, std::vector<double> row_major)
    : nx_(nx), d_(std::move(row_major)), dt_(d_.size()) {
  if (nx < 1 || d_.size() != static_cast<std::size_t>(nx) * nx)
    throw std::invalid_argument("DerivativeMatrix: size mismatch");
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j) dt_[j * nx + i] = d_[i * nx + j];
}

DerivativeMatrix DerivativeMatrix::padded(int p) const {
  if (p < 0) throw std::invalid_argument("DerivativeMatrix::padded: p < 0");
  const int m = nx_ + p;
  std::vector<double> out(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < nx_; ++i)
    for (int j = 0; j < nx_; ++j) out[i * m + j] = d_[i * nx_ + j];
  return DerivativeMatrix(m, std::move(out));
}

SpectralBasis build_basis(int degree) {
  if (degree < 1 || degree > SpectralBasis::kMaxDegree)
    throw std::invalid_argument("build_basis: degree must be in [1, 31], got " +
                                std::to_string(degree));
  const int n = degree;
  const int nx = n + 1;
  const double nn1 = static_cast<double>(n) * (n + 1);

  std::vector<double> x(nx);
  x[0] = -1.0;
  x[n] = 1.0;

  // Roots of f = (1 - x^2) L_N'(x). By the Legendre ODE, f' = -N(N+1) L_N(x).
  for (int i = 1; i < n; ++i) {
    double xi = -std::cos(std::numbers::pi * i / n);
    bool converged = false;
    for (int it = 0; it < kNewtonMaxIterations; ++it) {
      const auto [l, dl] = legendre_unchecked(n, xi);
      const double step = (1.0 - xi * xi) * dl / (-nn1 * l);
      xi -= step;
      if (std::abs(step) < kNewtonTolerance) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw std::runtime_error("build_basis: GLL Newton iteration did not converge for N=" +
                               std::to_string(n) + ", node " + std::to_string(i));
    x[i] = xi;
  }
  for (int i = 0; i < nx / 2; ++i) {
    const double s = 0.5 * (x[n - i] - x[i]);
    x[i] = -s;
    x[n - i] = s;
  }
  if (nx % 2 == 1) x[n / 2] = 0.0;

  std::vector<double> ln(nx);
  std::vector<double> w(nx);
  for (int i = 0; i < nx; ++i) {
    ln[i] = legendre_unchecked(n, x[i]).value;
    w[i] = 2.0 / (nn1 * ln[i] * ln[i]);
  }

  std::vector<double> d(static_cast<std::size_t>(nx) * nx, 0.0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j)
      if (i != j) d[i * nx + j] = ln[i] / (ln[j] * (x[i] - x[j]));
  d[0] = -nn1 / 4.0;
  d[n * nx + n] = nn1 / 4.0;

  SpectralBasis basis;
  basis.degree_ = n;
  basis.points_ = std::move(x);
  basis.weights_ = std::move(w);
  basis.deriv_ = DerivativeMatrix(nx, std::move(d));
  return basis;
}

}  // namespace semlab
