#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "udiscrim/errors.hpp"
#include "udiscrim/gateclass/schmidt.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::gateclass {

struct LieClosureReport {
  std::size_t closure_dimension = 0;
  Partition matched_partition;
  bool is_universal_on_partition_products = false;
};

namespace detail {

inline constexpr std::size_t kClosureDimCap = 64;

struct SparseEntry {
  std::size_t row, col;
  Complex value;
};
using SparseMatrix = std::vector<SparseEntry>;

/// Orthogonal Hermitian basis of d x d matrices: identity first, then the
/// generalized Gell-Mann matrices.
inline std::vector<SparseMatrix> gell_mann_basis(std::size_t d) {
  std::vector<SparseMatrix> out;
  SparseMatrix id;
  for (std::size_t i = 0; i < d; ++i) id.push_back({i, i, 1.0});
  out.push_back(id);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j + 1; k < d; ++k) {
      out.push_back({{j, k, 1.0}, {k, j, 1.0}});
      out.push_back({{j, k, Complex(0, -1)}, {k, j, Complex(0, 1)}});
    }
  for (std::size_t l = 1; l < d; ++l) {
    SparseMatrix m;
    const double c = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (std::size_t i = 0; i < l; ++i) m.push_back({i, i, c});
    m.push_back({l, l, -c * static_cast<double>(l)});
    out.push_back(m);
  }
  return out;
}

inline Matrix dense(const SparseMatrix& s, std::size_t d) {
  Matrix m(d, d);
  for (const auto& e : s) m(e.row, e.col) = e.value;
  return m;
}

/// I (x) ... (x) g (x) ... (x) I with g on `party`.
inline Matrix embed(const Matrix& g, std::span<const std::size_t> dims, std::size_t party) {
  Matrix out = Matrix::identity(1);
  for (std::size_t p = 0; p < dims.size(); ++p)
    out = linalg::tensor(out, p == party ? g : Matrix::identity(dims[p]));
  return out;
}

inline double hs_inner(const Matrix& a, const Matrix& b) {
  double s = 0;
  const auto ea = a.entries(), eb = b.entries();
  for (std::size_t k = 0; k < ea.size(); ++k) s += (std::conj(ea[k]) * eb[k]).real();
  return s;
}

/// Orthonormal (real Hilbert-Schmidt) basis of Hermitian matrices, grown by
/// Gram-Schmidt.
class HermitianSpan {
 public:
  explicit HermitianSpan(double threshold) : threshold_(threshold) {}

  /// Adds the component of h orthogonal to the span when its norm exceeds
  /// the threshold; true when it was new. The test is absolute, so brackets
  /// of unit elements that vanish exactly are not mistaken for new directions.
  bool add(Matrix h) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis_) h -= b * Complex(hs_inner(b, h));
    const double n = std::sqrt(hs_inner(h, h));
    if (!(n > threshold_)) return false;
    h *= 1.0 / n;
    basis_.push_back(std::move(h));
    return true;
  }

  const std::vector<Matrix>& basis() const { return basis_; }
  std::size_t size() const { return basis_.size(); }

 private:
  double threshold_;
  std::vector<Matrix> basis_;
};

/// Squared coefficient weight of each element on product Gell-Mann terms,
/// aggregated by the set of parties where the term is not the identity.
inline std::vector<double> support_weights(const Matrix& h, std::span<const std::size_t> dims) {
  const std::size_t n = dims.size();
  std::vector<std::vector<SparseMatrix>> local;
  for (auto d : dims) local.push_back(gell_mann_basis(d));
  std::vector<double> weights(std::size_t{1} << n, 0.0);

  std::vector<std::size_t> idx(n, 0);
  while (true) {
    // Tr(P h) / Tr(P P) for P = local[0][idx0] (x) ... ; enumerate nonzeros of P.
    Complex tr{};
    double pp = 1.0;
    for (std::size_t p = 0; p < n; ++p) {
      double s = 0;
      for (const auto& e : local[p][idx[p]]) s += std::norm(e.value);
      pp *= s;
    }
    std::vector<std::size_t> pos(n, 0);
    while (true) {
      std::size_t r = 0, c = 0;
      Complex v = 1.0;
      for (std::size_t p = 0; p < n; ++p) {
        const auto& e = local[p][idx[p]][pos[p]];
        r = r * dims[p] + e.row;
        c = c * dims[p] + e.col;
        v *= e.value;
      }
      tr += v * h(c, r);
      std::size_t p = n;
      while (p-- > 0) {
        if (++pos[p] < local[p][idx[p]].size()) break;
        pos[p] = 0;
      }
      if (p == static_cast<std::size_t>(-1)) break;
    }
    std::size_t mask = 0;
    for (std::size_t p = 0; p < n; ++p)
      if (idx[p] != 0) mask |= std::size_t{1} << p;
    weights[mask] += std::norm(tr) / pp;

    std::size_t p = n;
    while (p-- > 0) {
      if (++idx[p] < local[p].size()) break;
      idx[p] = 0;
    }
    if (p == static_cast<std::size_t>(-1)) break;
  }
  return weights;
}

inline std::size_t product_algebra_dim(const Partition& part, std::span<const std::size_t> dims) {
  std::size_t total = 1;
  for (const auto& block : part) {
    std::size_t d = 1;
    for (auto p : block) d *= dims[p];
    total += d * d - 1;
  }
  return total;
}

/// Finest party partition whose product algebra contains every element.
inline Partition match_partition(const std::vector<Matrix>& elements,
                                 std::span<const std::size_t> dims, double threshold) {
  const std::size_t n = dims.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::vector<double>> all;
  for (const auto& h : elements) all.push_back(support_weights(h, dims));

  for (const auto& w : all)
    for (std::size_t mask = 1; mask < w.size(); ++mask) {
      if (w[mask] <= threshold * threshold) continue;
      std::size_t first = n;
      for (std::size_t p = 0; p < n; ++p)
        if (mask >> p & 1) {
          if (first == n) first = p;
          else parent[find(p)] = find(first);
        }
    }

  auto blocks_of = [&] {
    Partition part;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t p = 0; p < n; ++p) {
      const auto root = find(p);
      if (slot[root] == n) {
        slot[root] = part.size();
        part.emplace_back();
      }
      part[slot[root]].push_back(p);
    }
    return part;
  };

  // Confirm the residual outside the block algebra stays below threshold.
  Partition part = blocks_of();
  std::vector<std::size_t> block_of(n);
  for (std::size_t b = 0; b < part.size(); ++b)
    for (auto p : part[b]) block_of[p] = b;
  for (const auto& w : all) {
    double outside = 0;
    for (std::size_t mask = 1; mask < w.size(); ++mask) {
      std::size_t blk = n;
      bool inside = true;
      for (std::size_t p = 0; p < n; ++p)
        if (mask >> p & 1) {
          if (blk == n) blk = block_of[p];
          else if (blk != block_of[p]) inside = false;
        }
      if (!inside) outside += w[mask];
    }
    if (std::sqrt(outside) > threshold) {
      Partition whole(1);
      for (std::size_t p = 0; p < n; ++p) whole[0].push_back(p);
      return whole;
    }
  }
  return part;
}

inline Matrix commutator_i(const Matrix& a, const Matrix& b) {
  return (a * b - b * a) * Complex(0, 1);
}

}  // namespace detail

/// Real Lie algebra generated by the local algebra and its conjugate by U.
/// Elements are stored as Hermitian H standing for iH.
inline LieClosureReport lie_closure(const UnitaryGate& u,
                                    const Tolerances& tol = default_tolerances()) {
  const auto dims = u.structure().local_dims();
  const std::size_t d = u.dim();
  if (d > detail::kClosureDimCap)
    throw InputError("lie_closure: total dimension " + std::to_string(d) + " exceeds " +
                     std::to_string(detail::kClosureDimCap));

  std::vector<Matrix> generators{Matrix::identity(d)};
  const Matrix& m = u.matrix();
  const Matrix md = m.adjoint();
  std::vector<Matrix> locals;
  for (std::size_t p = 0; p < dims.size(); ++p) {
    const auto basis = detail::gell_mann_basis(dims[p]);
    for (std::size_t k = 1; k < basis.size(); ++k)
      locals.push_back(detail::embed(detail::dense(basis[k], dims[p]), dims, p));
  }
  for (const auto& g : locals) generators.push_back(g);
  for (const auto& g : locals) generators.push_back(m * g * md);

  detail::HermitianSpan span(tol.closure_residual);
  std::vector<Matrix> kept_generators;
  for (auto g : generators) {
    g *= 1.0 / std::sqrt(detail::hs_inner(g, g));
    if (span.add(g)) kept_generators.push_back(span.basis().back());
  }

  // Right-normed brackets [g, x] with generators g span the generated algebra.
  const std::size_t full = d * d;
  for (std::size_t next = 0; next < span.size() && span.size() < full; ++next) {
    const Matrix x = span.basis()[next];
    for (const auto& g : kept_generators) {
      span.add(detail::commutator_i(g, x));
      if (span.size() >= full) break;
    }
  }

  LieClosureReport r;
  r.closure_dimension = span.size();
  r.matched_partition = detail::match_partition(span.basis(), dims, tol.closure_residual);
  r.is_universal_on_partition_products =
      r.closure_dimension == detail::product_algebra_dim(r.matched_partition, dims);
  return r;
}

/// Partition-primitivity of a gate on three or more parties.
inline GateClass multiparty_classify(const UnitaryGate& u,
                                     const Tolerances& tol = default_tolerances()) {
  const auto& s = u.structure();
  if (s.parties() < 3)
    throw InputError("multiparty_classify needs at least three parties; use classify_two_party");
  const auto report = lie_closure(u, tol);
  GateClass c;
  c.partition = report.matched_partition;
  const std::size_t n = s.parties();
  std::vector<std::size_t> ident(n);
  std::iota(ident.begin(), ident.end(), 0);
  if (c.partition.size() == 1) {
    c.label = Label::Imprimitive;
    c.permutation = ident;
    return c;
  }

  // Candidate block permutations: blocks may only move onto blocks with the
  // same sequence of local dimensions.
  const auto& part = c.partition;
  const std::size_t nb = part.size();
  auto signature = [&](std::size_t b) {
    std::vector<std::size_t> sig;
    for (auto p : part[b]) sig.push_back(s.dim(p));
    return sig;
  };
  std::vector<std::size_t> perm(nb);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t b = 0; b < nb && ok; ++b) ok = signature(b) == signature(perm[b]);
    if (!ok) continue;
    // Block b's content moves to the slot of block perm[b].
    std::vector<std::size_t> order(n);
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t k = 0; k < part[b].size(); ++k) order[part[perm[b]][k]] = part[b][k];
    const Matrix p = linalg::party_permutation(s.local_dims(), order);
    const UnitaryGate rest(u.matrix() * p.adjoint(), s, tol);
    bool product = true;
    for (std::size_t b = 0; b < nb && product; ++b)
      product = schmidt_rank(rest, part[b], tol).rank == 1;
    if (product) {
      c.label = Label::PartitionPrimitive;
      c.permutation = order;
      return c;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  // The closure is block-local but no block permutation factors U; report it
  // as primitive on the matched partition without a permutation.
  c.label = Label::PartitionPrimitive;
  c.permutation = ident;
  return c;
}

}  // namespace udiscrim::gateclass
