#include "semlab/solver.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace semlab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GatherScatterMap::GatherScatterMap(const BoxMesh& mesh, int degree, DirichletFaces faces)
    : degree_(degree), elements_(mesh.num_elements()) {
  if (degree < 1) throw std::invalid_argument("GatherScatterMap: degree must be >= 1");
  const int nx = degree + 1;
  const std::int64_t n3 = std::int64_t{nx} * nx * nx;
  const std::int64_t gx = std::int64_t{mesh.extents[0]} * degree + 1;
  const std::int64_t gy = std::int64_t{mesh.extents[1]} * degree + 1;
  const std::int64_t gz = std::int64_t{mesh.extents[2]} * degree + 1;

  global_id_.resize(elements_ * n3);
  multiplicity_.assign(gx * gy * gz, 0);
  mask_.assign(gx * gy * gz, 0);

  for (std::int64_t e = 0; e < elements_; ++e) {
    const auto c = mesh.element_coords(e);
    for (int k = 0; k < nx; ++k)
      for (int j = 0; j < nx; ++j)
        for (int i = 0; i < nx; ++i) {
          const std::int64_t x = std::int64_t{c[0]} * degree + i;
          const std::int64_t y = std::int64_t{c[1]} * degree + j;
          const std::int64_t z = std::int64_t{c[2]} * degree + k;
          const std::int64_t id = x + gx * (y + gy * z);
          global_id_[e * n3 + i + nx * (j + nx * k)] = id;
          ++multiplicity_[id];
        }
  }
  for (std::int64_t z = 0; z < gz; ++z)
    for (std::int64_t y = 0; y < gy; ++y)
      for (std::int64_t x = 0; x < gx; ++x) {
        bool boundary = x == 0;
        if (faces == DirichletFaces::all)
          boundary = boundary || x == gx - 1 || y == 0 || y == gy - 1 || z == 0 || z == gz - 1;
        mask_[x + gx * (y + gy * z)] = boundary ? 1 : 0;
      }
}

GatherScatterMap build_gs_map(const BoxMesh& mesh, int degree, DirichletFaces faces) {
  return GatherScatterMap(mesh, degree, faces);
}

void gather(const GatherScatterMap& map, std::span<const double> local, std::span<double> global) {
  if (static_cast<std::int64_t>(local.size()) != map.num_local() ||
      static_cast<std::int64_t>(global.size()) != map.num_global())
    throw std::invalid_argument("gather: size mismatch");
  std::fill(global.begin(), global.end(), 0.0);
  const auto ids = map.global_ids();
  // Local storage is element-major, so this visits copies in ascending element id.
  for (std::size_t l = 0; l < local.size(); ++l) global[ids[l]] += local[l];
}

void scatter(const GatherScatterMap& map, std::span<const double> global, std::span<double> local) {
  if (static_cast<std::int64_t>(local.size()) != map.num_local() ||
      static_cast<std::int64_t>(global.size()) != map.num_global())
    throw std::invalid_argument("scatter: size mismatch");
  const auto ids = map.global_ids();
#pragma omp parallel for schedule(static)
  for (std::size_t l = 0; l < local.size(); ++l) local[l] = global[ids[l]];
}

ElementField gather_scatter(const GatherScatterMap& map, const ElementField& local) {
  std::vector<double> global(map.num_global());
  gather(map, local.values, global);
  ElementField out = ElementField::zeros(local.degree, local.elements);
  scatter(map, global, out.values);
  return out;
}

PoissonOperator::PoissonOperator(const BoxMesh& mesh, const SpectralBasis& basis, Options options)
    : basis_(basis),
      gs_(mesh, basis.degree(), options.faces),
      geom_(build_geom_factors(mesh, basis)),
      coords_(nodal_coordinates(mesh, basis)),
      options_(options) {
  options_.kernel.validate(basis.degree());
}

void PoissonOperator::apply_mask(std::span<double> v) const {
  const auto m = gs_.mask();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (m[i]) v[i] = 0.0;
}

void PoissonOperator::apply(std::span<const double> in, std::span<double> out,
                            OpCounters* counters, double* ax_seconds) const {
  auto local = ElementField::zeros(basis_.degree(), gs_.elements());
  scatter(gs_, in, local.values);
  const auto start = std::chrono::steady_clock::now();
  const auto w = ax_apply(options_.kernel, local, geom_, basis_, counters, options_.threads);
  const auto stop = std::chrono::steady_clock::now();
  if (ax_seconds) *ax_seconds += std::chrono::duration<double>(stop - start).count();
  gather(gs_, w.values, out);
  apply_mask(out);
}

std::vector<double> PoissonOperator::load_vector(
    const std::function<double(double, double, double)>& f) const {
  std::vector<double> local(gs_.num_local());
  for (std::size_t l = 0; l < local.size(); ++l)
    local[l] = geom_.mass[l] * f(coords_.x[l], coords_.y[l], coords_.z[l]);
  std::vector<double> global(gs_.num_global());
  gather(gs_, local, global);
  apply_mask(global);
  return global;
}

std::vector<double> PoissonOperator::interpolate(
    const std::function<double(double, double, double)>& f) const {
  std::vector<double> global(gs_.num_global(), 0.0);
  const auto ids = gs_.global_ids();
  for (std::size_t l = 0; l < ids.size(); ++l)
    global[ids[l]] = f(coords_.x[l], coords_.y[l], coords_.z[l]);
  return global;
}

CgResult cg_solve(const PoissonOperator& op, std::span<const double> rhs, double tol,
                  int max_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("cg_solve: tol must be positive");
  const auto n = static_cast<std::size_t>(op.size());
  if (rhs.size() != n) throw std::invalid_argument("cg_solve: rhs size mismatch");

  CgResult result;
  result.solution.assign(n, 0.0);
  std::vector<double> r(rhs.begin(), rhs.end());
  op.apply_mask(r);
  double rr = dot(r, r);
  if (!std::isfinite(rr)) throw std::runtime_error("cg_solve: non-finite right-hand side");
  const double r0 = std::sqrt(rr);
  result.residual_history.push_back(r0);
  if (r0 == 0.0) {
    result.converged = true;
    return result;
  }

  std::vector<double> p = r;
  std::vector<double> ap(n);
  for (int it = 1; it <= max_iters; ++it) {
    OpCounters counters;
    double seconds = 0.0;
    op.apply(p, ap, &counters, &seconds);
    result.ax_gflops.push_back(seconds > 0.0 ? counters.flops() / seconds * 1e-9 : 0.0);

    const double pap = dot(p, ap);
    if (!std::isfinite(pap))
      throw std::runtime_error("cg_solve: NaN/Inf at iteration " + std::to_string(it));
    if (!(pap > 0.0))
      throw std::runtime_error("cg_solve: operator is not positive definite (p^T A p <= 0)");
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      result.solution[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    if (!std::isfinite(rr_new))
      throw std::runtime_error("cg_solve: NaN/Inf at iteration " + std::to_string(it));
    result.iterations = it;
    result.residual_history.push_back(std::sqrt(rr_new));
    if (std::sqrt(rr_new) <= tol * r0) {
      result.converged = true;
      return result;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return result;
}

CgResult cg_solve(const BoxMesh& mesh, const SpectralBasis& basis,
                  const std::function<double(double, double, double)>& rhs, double tol,
                  int max_iters, PoissonOperator::Options options) {
  const PoissonOperator op(mesh, basis, options);
  const auto b = op.load_vector(rhs);
  return cg_solve(op, b, tol, max_iters);
}

ManufacturedResult solve_manufactured(const BoxMesh& mesh, const SpectralBasis& basis, double tol,
                                      int max_iters, PoissonOperator::Options options) {
  using std::numbers::pi;
  auto exact = [](double x, double y, double z) {
    return std::sin(pi * x) * std::sin(pi * y) * std::sin(pi * z);
  };
  auto source = [&](double x, double y, double z) { return 3.0 * pi * pi * exact(x, y, z); };

  options.faces = DirichletFaces::all;
  const PoissonOperator op(mesh, basis, options);
  ManufacturedResult out;
  out.cg = cg_solve(op, op.load_vector(source), tol, max_iters);
  const auto reference = op.interpolate(exact);
  for (std::size_t i = 0; i < reference.size(); ++i)
    out.max_nodal_error =
        std::max(out.max_nodal_error, std::abs(out.cg.solution[i] - reference[i]));
  return out;
}

}  // namespace semlab
