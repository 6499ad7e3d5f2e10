#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "udiscrim/errors.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::gateclass {

using linalg::Complex;
using linalg::Matrix;
using linalg::PartyStructure;
using linalg::UnitaryGate;

enum class Label { Product, ProductSwap, PartitionPrimitive, Imprimitive };

inline const char* to_string(Label l) {
  switch (l) {
    case Label::Product: return "Product";
    case Label::ProductSwap: return "ProductSwap";
    case Label::PartitionPrimitive: return "PartitionPrimitive";
    case Label::Imprimitive: return "Imprimitive";
  }
  return "?";
}

using Partition = std::vector<std::vector<std::size_t>>;

struct GateClass {
  Label label = Label::Imprimitive;
  Partition partition;                      // 0-based parties, for PartitionPrimitive
  std::vector<std::size_t> permutation;     // U = U_blocks * P(permutation)
  std::optional<std::vector<Matrix>> local_factors;
};

struct SchmidtResult {
  std::size_t rank = 0;
  std::vector<double> coefficients;  // descending
};

namespace detail {

struct Realigned {
  Matrix r;
  std::size_t dim_a, dim_b;
};

/// Moves the parties in `side_a` to the front and realigns
/// ((i,k),(j,l)) -> ((i,j),(k,l)).
inline Realigned realign(const Matrix& u, const PartyStructure& s,
                         std::span<const std::size_t> side_a) {
  const std::size_t n = s.parties();
  std::vector<bool> in_a(n, false);
  for (auto p : side_a) {
    if (p >= n || in_a[p]) throw InputError("invalid bipartition");
    in_a[p] = true;
  }
  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < n; ++p)
    if (in_a[p]) order.push_back(p);
  const std::size_t na = order.size();
  for (std::size_t p = 0; p < n; ++p)
    if (!in_a[p]) order.push_back(p);
  if (na == 0 || na == n) throw InputError("bipartition sides must both be nonempty");

  const Matrix p = linalg::party_permutation(s.local_dims(), order);
  const Matrix up = p * u * p.adjoint();
  std::size_t da = 1;
  for (std::size_t k = 0; k < na; ++k) da *= s.dim(order[k]);
  const std::size_t db = s.total_dim() / da;

  Matrix r(da * da, db * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t k = 0; k < db; ++k)
      for (std::size_t j = 0; j < da; ++j)
        for (std::size_t l = 0; l < db; ++l) r(i * da + j, k * db + l) = up(i * db + k, j * db + l);
  return {r, da, db};
}

inline Matrix reshape_square(const linalg::Vector& v, std::size_t d) {
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = v[i * d + j];
  return m;
}

/// Splits a (numerically) product operator M = A (x) B on dims (da, db).
/// A is scaled so its largest-modulus entry is real positive.
inline std::pair<Matrix, Matrix> factor_product(const Matrix& m, std::size_t da, std::size_t db,
                                                const Tolerances& tol) {
  const PartyStructure s{da, db};
  const std::vector<std::size_t> a{0};
  const auto re = realign(m, s, a);
  const auto dec = linalg::svd(re.r, tol);
  Matrix fa = reshape_square(dec.left.column(0), da);
  Matrix fb = reshape_square(dec.right.column(0), db).conjugate();
  Complex big{};
  for (auto z : fa.entries())
    if (std::abs(z) > std::abs(big) + 1e-12) big = z;
  const Complex ph = std::abs(big) > 0 ? std::conj(big) / std::abs(big) : Complex(1.0);
  const double scale_a = std::sqrt(static_cast<double>(da));
  fa *= ph * scale_a;
  fb *= std::conj(ph) * (dec.values[0] / scale_a);
  return {fa, fb};
}

}  // namespace detail

/// Operator-Schmidt rank of U across the cut `side_a` | rest.
inline SchmidtResult schmidt_rank(const UnitaryGate& u, std::span<const std::size_t> side_a,
                                  const Tolerances& tol = default_tolerances()) {
  const auto re = detail::realign(u.matrix(), u.structure(), side_a);
  const auto dec = linalg::svd(re.r, tol);
  SchmidtResult out;
  for (double s : dec.values) {
    out.coefficients.push_back(s);
    if (s > tol.rank_cutoff) ++out.rank;
  }
  return out;
}

inline SchmidtResult schmidt_rank(const UnitaryGate& u, std::initializer_list<std::size_t> side_a,
                                  const Tolerances& tol = default_tolerances()) {
  return schmidt_rank(u, std::span<const std::size_t>(side_a.begin(), side_a.size()), tol);
}

/// Product / ProductSwap / Imprimitive for a two-party gate.
inline GateClass classify_two_party(const UnitaryGate& u,
                                    const Tolerances& tol = default_tolerances()) {
  const auto& s = u.structure();
  if (s.parties() != 2)
    throw InputError("classify_two_party needs exactly two parties (got " +
                     std::to_string(s.parties()) + "); use multiparty_classify");
  const std::size_t da = s.dim(0), db = s.dim(1);
  const std::vector<std::size_t> cut{0};

  auto try_product = [&](const Matrix& m, const Matrix& tail, Label label) -> std::optional<GateClass> {
    const UnitaryGate g(m, s, tol);
    if (schmidt_rank(g, cut, tol).rank != 1) return std::nullopt;
    auto [fa, fb] = detail::factor_product(m, da, db, tol);
    const double err = linalg::max_abs_diff(linalg::tensor(fa, fb) * tail, u.matrix());
    if (!(err <= tol.reconstruction)) return std::nullopt;
    GateClass c;
    c.label = label;
    c.partition = {{0}, {1}};
    c.permutation = label == Label::Product ? std::vector<std::size_t>{0, 1}
                                            : std::vector<std::size_t>{1, 0};
    c.local_factors = std::vector<Matrix>{fa, fb};
    return c;
  };

  if (auto c = try_product(u.matrix(), Matrix::identity(s.total_dim()), Label::Product)) return *c;
  if (da == db) {
    const Matrix sw = linalg::swap_gate(da);
    if (auto c = try_product(u.matrix() * sw, sw, Label::ProductSwap)) return *c;
  }
  GateClass c;
  c.label = Label::Imprimitive;
  c.partition = {{0, 1}};
  c.permutation = {0, 1};
  return c;
}

}  // namespace udiscrim::gateclass
