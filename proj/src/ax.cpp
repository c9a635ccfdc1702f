#include "semlab/ax.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace semlab {

namespace {

constexpr int kMaxUnroll = 16;
constexpr int kMaxPadProbe = 8;

struct ElementPtrs {
  const double* u;
  const double* g[6];
  double* w;
};

ElementPtrs element_ptrs(const ElementField& u, const GeomFactors& g, ElementField& w,
                         std::int64_t e) {
  const auto off = e * u.dofs_per_element();
  return {u.values.data() + off,
          {g.g[0].data() + off, g.g[1].data() + off, g.g[2].data() + off, g.g[3].data() + off,
           g.g[4].data() + off, g.g[5].data() + off},
          w.values.data() + off};
}

// Literal two-pass contraction. dxt[l + i*nx] = D(i,l), dx[l + i*nx] = D(l,i).
template <bool kCount>
void reference_element(int nx, const ElementPtrs& p, const double* dx, const double* dxt,
                       double* shur, double* shus, double* shut, OpCounters& c) {
  const int nx2 = nx * nx;
  const double* u = p.u;
  for (int k = 0; k < nx; ++k)
    for (int j = 0; j < nx; ++j)
      for (int i = 0; i < nx; ++i) {
        const int ij = i + j * nx;
        const int ijk = ij + k * nx2;
        double rtmp = 0.0, stmp = 0.0, ttmp = 0.0;
        for (int l = 0; l < nx; ++l) {
          rtmp += dxt[l + i * nx] * u[l + j * nx + k * nx2];
          stmp += dxt[l + j * nx] * u[i + l * nx + k * nx2];
          ttmp += dxt[l + k * nx] * u[ij + l * nx2];
          if constexpr (kCount) {
            c.adds += 3;
            c.mults += 3;
          }
        }
        shur[ijk] = p.g[kG11][ijk] * rtmp + p.g[kG12][ijk] * stmp + p.g[kG13][ijk] * ttmp;
        shus[ijk] = p.g[kG12][ijk] * rtmp + p.g[kG22][ijk] * stmp + p.g[kG23][ijk] * ttmp;
        shut[ijk] = p.g[kG13][ijk] * rtmp + p.g[kG23][ijk] * stmp + p.g[kG33][ijk] * ttmp;
        if constexpr (kCount) {
          c.adds += 6;
          c.mults += 9;
        }
      }
  for (int k = 0; k < nx; ++k)
    for (int j = 0; j < nx; ++j)
      for (int i = 0; i < nx; ++i) {
        const int ij = i + j * nx;
        const int ijk = ij + k * nx2;
        double wijk = 0.0;
        for (int l = 0; l < nx; ++l) {
          wijk += dx[l + i * nx] * shur[l + j * nx + k * nx2];
          wijk += dx[l + j * nx] * shus[i + l * nx + k * nx2];
          wijk += dx[l + k * nx] * shut[ij + l * nx2];
          if constexpr (kCount) {
            c.adds += 3;
            c.mults += 3;
          }
        }
        p.w[ijk] = wijk;
      }
  if constexpr (kCount) {
    const std::int64_t n3 = std::int64_t{nx} * nx2;
    c.loads_bytes += 7 * n3 * std::int64_t{sizeof(double)};
    c.writes_bytes += n3 * std::int64_t{sizeof(double)};
  }
}

// Same contraction over U consecutive i-points per step. Per-DOF accumulation
// order is unchanged, so results match the reference bit for bit.
template <int U>
void unrolled_element(int nx, const ElementPtrs& p, const double* dx, const double* dxt,
                      double* shur, double* shus, double* shut) {
  const int nx2 = nx * nx;
  const double* u = p.u;
  for (int k = 0; k < nx; ++k)
    for (int j = 0; j < nx; ++j)
      for (int i0 = 0; i0 < nx; i0 += U) {
        double r[U] = {}, s[U] = {}, t[U] = {};
        for (int l = 0; l < nx; ++l) {
          const double ds = dxt[l + j * nx];
          const double dt = dxt[l + k * nx];
          const double* urow = u + j * nx + k * nx2;
          const double* srow = u + l * nx + k * nx2;
          const double* trow = u + j * nx + l * nx2;
#pragma omp simd
          for (int q = 0; q < U; ++q) {
            const int i = i0 + q;
            r[q] += dxt[l + i * nx] * urow[l];
            s[q] += ds * srow[i];
            t[q] += dt * trow[i];
          }
        }
#pragma omp simd
        for (int q = 0; q < U; ++q) {
          const int ijk = i0 + q + j * nx + k * nx2;
          shur[ijk] = p.g[kG11][ijk] * r[q] + p.g[kG12][ijk] * s[q] + p.g[kG13][ijk] * t[q];
          shus[ijk] = p.g[kG12][ijk] * r[q] + p.g[kG22][ijk] * s[q] + p.g[kG23][ijk] * t[q];
          shut[ijk] = p.g[kG13][ijk] * r[q] + p.g[kG23][ijk] * s[q] + p.g[kG33][ijk] * t[q];
        }
      }
  for (int k = 0; k < nx; ++k)
    for (int j = 0; j < nx; ++j)
      for (int i0 = 0; i0 < nx; i0 += U) {
        double acc[U] = {};
        for (int l = 0; l < nx; ++l) {
          const double ds = dx[l + j * nx];
          const double dt = dx[l + k * nx];
          const double* rrow = shur + j * nx + k * nx2;
          const double* srow = shus + l * nx + k * nx2;
          const double* trow = shut + j * nx + l * nx2;
#pragma omp simd
          for (int q = 0; q < U; ++q) {
            const int i = i0 + q;
            acc[q] += dx[l + i * nx] * rrow[l];
            acc[q] += ds * srow[i];
            acc[q] += dt * trow[i];
          }
        }
        for (int q = 0; q < U; ++q) p.w[i0 + q + j * nx + k * nx2] = acc[q];
      }
}

// Arithmetic and traffic of one element, tallied from the loop structure of
// the staged kernels (identical trip counts to the reference).
OpCounters element_tally(int nx) {
  const std::int64_t n3 = std::int64_t{nx} * nx * nx;
  OpCounters c;
  c.adds = n3 * (3 * nx + 6 + 3 * nx);
  c.mults = n3 * (3 * nx + 9 + 3 * nx);
  c.loads_bytes = 7 * n3 * std::int64_t{sizeof(double)};
  c.writes_bytes = n3 * std::int64_t{sizeof(double)};
  return c;
}

using StagedKernel = void (*)(int, const ElementPtrs&, const double*, const double*, double*,
                              double*, double*);

void buffered_body(int nx, const ElementPtrs& p, const double* dx, const double* dxt, double* shur,
                   double* shus, double* shut) {
  OpCounters unused;
  reference_element<false>(nx, p, dx, dxt, shur, shus, shut, unused);
}

StagedKernel staged_kernel(KernelKind kind, int unroll) {
  if (kind == KernelKind::buffered) return &buffered_body;
  switch (unroll) {
    case 1: return &unrolled_element<1>;
    case 2: return &unrolled_element<2>;
    case 4: return &unrolled_element<4>;
    case 8: return &unrolled_element<8>;
    case 16: return &unrolled_element<16>;
    default: throw std::invalid_argument("unsupported unroll factor");
  }
}

// Element-parallel driver for the staged variants. Each thread owns a scratch
// block holding one element's u, six factor arrays and shur/shus/shut, plus a
// private copy of the derivative operator.
void run_staged(StagedKernel kernel, const ElementField& u, const GeomFactors& g,
                const DerivativeMatrix& deriv, ElementField& w, OpCounters* counters,
                int threads) {
  const int nx = deriv.size();
  const std::int64_t n3 = u.dofs_per_element();
  const std::int64_t num_elements = u.elements;
  const int team = threads > 0 ? threads : omp_get_max_threads();
  std::int64_t elements_done = 0;

#pragma omp parallel num_threads(team) reduction(+ : elements_done)
  {
    std::vector<double> scratch(static_cast<std::size_t>(10 * n3));
    std::vector<double> dx(deriv.dx().begin(), deriv.dx().end());
    std::vector<double> dxt(deriv.dxt().begin(), deriv.dxt().end());
    double* us = scratch.data();
    double* gs = us + n3;
    double* shur = gs + 6 * n3;
    double* shus = shur + n3;
    double* shut = shus + n3;

#pragma omp for schedule(static)
    for (std::int64_t e = 0; e < num_elements; ++e) {
      const auto src = element_ptrs(u, g, w, e);
      std::copy_n(src.u, n3, us);
      for (int c = 0; c < 6; ++c) std::copy_n(src.g[c], n3, gs + c * n3);
      const ElementPtrs staged{us, {gs, gs + n3, gs + 2 * n3, gs + 3 * n3, gs + 4 * n3, gs + 5 * n3},
                               src.w};
      kernel(nx, staged, dx.data(), dxt.data(), shur, shus, shut);
      ++elements_done;
    }
  }
  if (counters) {
    OpCounters per = element_tally(nx);
    per.adds *= elements_done;
    per.mults *= elements_done;
    per.loads_bytes *= elements_done;
    per.writes_bytes *= elements_done;
    *counters += per;
  }
}

void run_reference(const ElementField& u, const GeomFactors& g, const DerivativeMatrix& deriv,
                   ElementField& w, OpCounters* counters) {
  const int nx = deriv.size();
  const auto n3 = u.dofs_per_element();
  std::vector<double> shur(n3), shus(n3), shut(n3);
  const double* dx = deriv.dx().data();
  const double* dxt = deriv.dxt().data();
  OpCounters local;
  for (std::int64_t e = 0; e < u.elements; ++e) {
    const auto p = element_ptrs(u, g, w, e);
    if (counters)
      reference_element<true>(nx, p, dx, dxt, shur.data(), shus.data(), shut.data(), local);
    else
      reference_element<false>(nx, p, dx, dxt, shur.data(), shus.data(), shut.data(), local);
  }
  if (counters) *counters += local;
}

void check_shapes(const ElementField& u, const GeomFactors& g, const DerivativeMatrix& deriv) {
  if (u.degree < 1) throw std::invalid_argument("ax_apply: degree must be >= 1");
  if (u.degree != g.degree || u.elements != g.elements)
    throw std::invalid_argument("ax_apply: field and geometric factors disagree on N or E");
  if (deriv.size() != u.degree + 1)
    throw std::invalid_argument("ax_apply: derivative matrix size does not match N+1");
  if (u.size() != u.elements * u.dofs_per_element())
    throw std::invalid_argument("ax_apply: field length is not E*(N+1)^3");
  for (const auto& a : g.g)
    if (static_cast<std::int64_t>(a.size()) != g.size())
      throw std::invalid_argument("ax_apply: geometric factor array has wrong length");
}

}  // namespace

ElementField ElementField::zeros(int degree, std::int64_t elements) {
  ElementField f;
  f.degree = degree;
  f.elements = elements;
  f.values.assign(static_cast<std::size_t>(elements * f.dofs_per_element()), 0.0);
  return f;
}

int widest_unroll(int n) {
  int u = 1;
  while (u < kMaxUnroll && n % (2 * u) == 0) u *= 2;
  return u;
}

KernelVariant KernelVariant::parse(std::string_view text) {
  auto number_after = [&](std::string_view prefix) {
    const auto digits = text.substr(prefix.size());
    int value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size())
      throw std::invalid_argument("bad kernel id: " + std::string(text));
    return value;
  };
  if (text == "ref" || text == "reference") return reference();
  if (text == "buffered") return buffered();
  if (text.starts_with("unroll")) return unrolled(number_after("unroll"));
  if (text.starts_with("pad")) return padded(number_after("pad"));
  throw std::invalid_argument("unknown kernel id: " + std::string(text));
}

std::string KernelVariant::id() const {
  switch (kind) {
    case KernelKind::reference: return "ref";
    case KernelKind::buffered: return "buffered";
    case KernelKind::unrolled: return "unroll" + std::to_string(param);
    case KernelKind::padded: return "pad" + std::to_string(param);
  }
  return "?";
}

void KernelVariant::validate(int degree) const {
  const int nx = degree + 1;
  switch (kind) {
    case KernelKind::reference:
    case KernelKind::buffered:
      return;
    case KernelKind::unrolled:
      if (param < 1 || param > kMaxUnroll || (param & (param - 1)) != 0)
        throw std::invalid_argument("unroll factor must be one of 1, 2, 4, 8, 16");
      if (nx % param != 0)
        throw std::invalid_argument("unroll factor " + std::to_string(param) +
                                    " does not divide N+1 = " + std::to_string(nx));
      return;
    case KernelKind::padded:
      if (param < 1) throw std::invalid_argument("padding must be >= 1");
      if (widest_unroll(nx + param) <= widest_unroll(nx))
        throw std::invalid_argument("padding " + std::to_string(param) +
                                    " does not widen the legal unroll for N+1 = " +
                                    std::to_string(nx));
      return;
  }
}

bool KernelVariant::valid_for(int degree) const {
  try {
    validate(degree);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

std::vector<KernelVariant> variants_for_degree(int degree) {
  std::vector<KernelVariant> out{KernelVariant::reference(), KernelVariant::buffered()};
  for (int u = 1; u <= kMaxUnroll; u *= 2)
    if ((degree + 1) % u == 0) out.push_back(KernelVariant::unrolled(u));
  for (int p = 1; p <= kMaxPadProbe; ++p)
    if (KernelVariant::padded(p).valid_for(degree)) out.push_back(KernelVariant::padded(p));
  return out;
}

ElementField ax_apply(const KernelVariant& variant, const ElementField& u, const GeomFactors& g,
                      const DerivativeMatrix& deriv, OpCounters* counters, int threads) {
  check_shapes(u, g, deriv);
  variant.validate(u.degree);

  if (variant.kind == KernelKind::padded) {
    const auto padded = pad_field(u, g, deriv, variant.param);
    const auto unroll = widest_unroll(padded.deriv.size());
    auto w = ax_apply(KernelVariant::unrolled(unroll), padded.u, padded.g, padded.deriv, counters,
                      threads);
    return restrict_field(w, u.degree);
  }

  ElementField w = ElementField::zeros(u.degree, u.elements);
  if (variant.kind == KernelKind::reference)
    run_reference(u, g, deriv, w, counters);
  else
    run_staged(staged_kernel(variant.kind, variant.param), u, g, deriv, w, counters, threads);
  return w;
}

Traffic ax_traffic(int degree, std::int64_t elements) {
  if (degree < 1 || elements < 1)
    throw std::invalid_argument("ax_traffic: N and E must be >= 1");
  const std::int64_t nx = degree + 1;
  const std::int64_t dofs = elements * nx * nx * nx;
  constexpr std::int64_t kBytes = sizeof(double);
  return {7 * kBytes * dofs, 1 * kBytes * dofs};
}

PaddedProblem pad_field(const ElementField& u, const GeomFactors& g, const DerivativeMatrix& deriv,
                        int pad) {
  if (pad < 1) throw std::invalid_argument("pad_field: padding must be >= 1");
  check_shapes(u, g, deriv);
  const int nx = u.degree + 1;
  const int mx = nx + pad;
  PaddedProblem out{ElementField::zeros(u.degree + pad, u.elements),
                    GeomFactors::zeros(u.degree + pad, u.elements), deriv.padded(pad), pad};
  const auto n3 = u.dofs_per_element();
  const auto m3 = out.u.dofs_per_element();
  for (std::int64_t e = 0; e < u.elements; ++e)
    for (int k = 0; k < nx; ++k)
      for (int j = 0; j < nx; ++j)
        for (int i = 0; i < nx; ++i) {
          const auto src = e * n3 + i + nx * (j + nx * k);
          const auto dst = e * m3 + i + mx * (j + mx * k);
          out.u.values[dst] = u.values[src];
          for (int c = 0; c < 6; ++c) out.g.g[c][dst] = g.g[c][src];
          out.g.mass[dst] = g.mass.empty() ? 0.0 : g.mass[src];
        }
  return out;
}

ElementField restrict_field(const ElementField& padded, int degree) {
  if (degree > padded.degree) throw std::invalid_argument("restrict_field: degree too large");
  const int nx = degree + 1;
  const int mx = padded.degree + 1;
  ElementField out = ElementField::zeros(degree, padded.elements);
  const auto n3 = out.dofs_per_element();
  const auto m3 = padded.dofs_per_element();
  for (std::int64_t e = 0; e < padded.elements; ++e)
    for (int k = 0; k < nx; ++k)
      for (int j = 0; j < nx; ++j)
        for (int i = 0; i < nx; ++i)
          out.values[e * n3 + i + nx * (j + nx * k)] =
              padded.values[e * m3 + i + mx * (j + mx * k)];
  return out;
}

}  // namespace semlab
