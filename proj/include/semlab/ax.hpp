#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semlab/basis.hpp"
#include "semlab/geometry.hpp"

namespace semlab {

/// Nodal values of E elements of (N+1)^3 DOFs, element-major, i fastest.
struct ElementField {
  int degree = 0;
  std::int64_t elements = 0;
  std::vector<double> values;

  static ElementField zeros(int degree, std::int64_t elements);

  std::int64_t dofs_per_element() const {
    const std::int64_t nx = degree + 1;
    return nx * nx * nx;
  }
  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
  std::span<double> element(std::int64_t e) {
    return std::span<double>(values).subspan(e * dofs_per_element(), dofs_per_element());
  }
  std::span<const double> element(std::int64_t e) const {
    return std::span<const double>(values).subspan(e * dofs_per_element(), dofs_per_element());
  }
};

enum class KernelKind { reference, buffered, unrolled, padded };

/// Which implementation of the local operator to run.
///
///  - reference: serial, literal two-pass contraction
///  - buffered: stages each element into a contiguous scratch block
///  - unrolled(U): buffered, with U consecutive i-points per step; U must be a
///    power of two <= 16 dividing N+1
///  - padded(p): pads to N+1+p points and runs the widest legal unroll there
struct KernelVariant {
  KernelKind kind = KernelKind::reference;
  int param = 0;

  static KernelVariant reference() { return {KernelKind::reference, 0}; }
  static KernelVariant buffered() { return {KernelKind::buffered, 0}; }
  static KernelVariant unrolled(int unroll) { return {KernelKind::unrolled, unroll}; }
  static KernelVariant padded(int pad) { return {KernelKind::padded, pad}; }

  /// Parses "ref", "buffered", "unrollU", "padP".
  static KernelVariant parse(std::string_view text);
  std::string id() const;

  /// Throws std::invalid_argument if the variant is not legal for `degree`.
  void validate(int degree) const;
  bool valid_for(int degree) const;

  bool operator==(const KernelVariant&) const = default;
};

/// Largest power of two <= 16 that divides n.
int widest_unroll(int n);

/// Every variant legal at `degree`: ref, buffered, each unrolled(U) and the
/// padded variants with p in [1, 8] that widen the unroll.
std::vector<KernelVariant> variants_for_degree(int degree);

struct OpCounters {
  std::int64_t adds = 0;
  std::int64_t mults = 0;
  std::int64_t loads_bytes = 0;
  std::int64_t writes_bytes = 0;

  std::int64_t flops() const { return adds + mults; }
  OpCounters& operator+=(const OpCounters& o) {
    adds += o.adds;
    mults += o.mults;
    loads_bytes += o.loads_bytes;
    writes_bytes += o.writes_bytes;
    return *this;
  }
  bool operator==(const OpCounters&) const = default;
};

/// w = A^e u for every element. When `counters` is given, the arithmetic and
/// external traffic actually executed are added to it (for padded(p) that is
/// the work on the padded element). `threads` <= 0 uses the OpenMP default;
/// the reference variant always runs serially.
///
/// Throws std::invalid_argument on dimension mismatch or an illegal variant.
ElementField ax_apply(const KernelVariant& variant, const ElementField& u, const GeomFactors& g,
                      const DerivativeMatrix& deriv, OpCounters* counters = nullptr,
                      int threads = 0);

inline ElementField ax_apply(const KernelVariant& variant, const ElementField& u,
                             const GeomFactors& g, const SpectralBasis& basis,
                             OpCounters* counters = nullptr, int threads = 0) {
  return ax_apply(variant, u, g, basis.deriv(), counters, threads);
}

struct Traffic {
  std::int64_t loads_bytes = 0;
  std::int64_t writes_bytes = 0;
  bool operator==(const Traffic&) const = default;
};

/// Idealised external traffic of one application: 7 loads and 1 write of a
/// double per DOF.
Traffic ax_traffic(int degree, std::int64_t elements);

struct PaddedProblem {
  ElementField u;
  GeomFactors g;
  DerivativeMatrix deriv;
  int pad = 0;
};

/// Embeds each element in an (N+1+p)^3 block. Extra DOFs carry zero field
/// values and zero geometric factors; the derivative matrix is zero-extended.
PaddedProblem pad_field(const ElementField& u, const GeomFactors& g, const DerivativeMatrix& deriv,
                        int pad);

/// Inverse of the embedding in pad_field: keeps the leading (N+1)^3 block.
ElementField restrict_field(const ElementField& padded, int degree);

}  // namespace semlab
