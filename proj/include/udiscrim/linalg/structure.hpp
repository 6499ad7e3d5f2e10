#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "udiscrim/errors.hpp"
#include "udiscrim/linalg/eigen.hpp"
#include "udiscrim/linalg/matrix.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::linalg {

/// Ordered local dimensions, one per party.
class PartyStructure {
 public:
  PartyStructure() = default;
  explicit PartyStructure(std::vector<std::size_t> local_dims)
      : dims_(std::move(local_dims)) {
    if (dims_.empty()) throw InputError("party structure must be nonempty");
    for (auto d : dims_)
      if (d < 2) throw InputError("every local dimension must be at least 2");
  }
  PartyStructure(std::initializer_list<std::size_t> dims)
      : PartyStructure(std::vector<std::size_t>(dims)) {}

  /// Single party of the given dimension.
  static PartyStructure single(std::size_t dim) { return PartyStructure({dim}); }

  std::span<const std::size_t> local_dims() const noexcept { return dims_; }
  std::size_t parties() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t party) const { return dims_.at(party); }
  std::size_t total_dim() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                           std::multiplies<>());
  }

  friend bool operator==(const PartyStructure&, const PartyStructure&) = default;

 private:
  std::vector<std::size_t> dims_;
};

/// A unitary matrix together with the party structure it acts on.
class UnitaryGate {
 public:
  UnitaryGate() = default;
  UnitaryGate(Matrix m, PartyStructure s, const Tolerances& tol = default_tolerances())
      : matrix_(std::move(m)), structure_(std::move(s)) {
    if (!matrix_.is_square() || matrix_.rows() != structure_.total_dim()) {
      throw InputError("gate dimension " + std::to_string(matrix_.rows()) +
                       " does not match party structure dimension " +
                       std::to_string(structure_.total_dim()));
    }
    const double defect = unitarity_defect(matrix_);
    if (!(defect <= tol.unitarity)) {
      throw InputError("matrix is not unitary (max |U^dag U - I| = " +
                       std::to_string(defect) + ")");
    }
  }
  /// Single-party gate.
  explicit UnitaryGate(Matrix m, const Tolerances& tol = default_tolerances())
      : UnitaryGate(m, PartyStructure::single(std::max<std::size_t>(m.rows(), 2)), tol) {}

  const Matrix& matrix() const noexcept { return matrix_; }
  const PartyStructure& structure() const noexcept { return structure_; }
  std::size_t dim() const noexcept { return matrix_.rows(); }

  UnitaryGate adjoint() const { return {matrix_.adjoint(), structure_}; }

 private:
  Matrix matrix_;
  PartyStructure structure_;
};

inline UnitaryGate two_qubit(const Matrix& m) { return {m, PartyStructure{2, 2}}; }

/// Unit-norm amplitude vector with party structure.
class PureState {
 public:
  PureState() = default;
  PureState(Vector amplitudes, PartyStructure s, const Tolerances& tol = default_tolerances())
      : amps_(std::move(amplitudes)), structure_(std::move(s)) {
    if (amps_.size() != structure_.total_dim()) throw InputError("state dimension mismatch");
    if (std::abs(linalg::norm(amps_) - 1.0) > tol.unitarity)
      throw InputError("state is not normalized");
  }

  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  const Vector& vector() const noexcept { return amps_; }
  const PartyStructure& structure() const noexcept { return structure_; }

 private:
  Vector amps_;
  PartyStructure structure_;
};

/// Hermitian, unit-trace, positive semidefinite matrix with party structure.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(Matrix rho, PartyStructure s, const Tolerances& tol = default_tolerances());

  static DensityMatrix from_pure(const PureState& psi) {
    return {outer(psi.amplitudes(), psi.amplitudes()), psi.structure()};
  }
  static DensityMatrix maximally_mixed(const PartyStructure& s) {
    const auto n = s.total_dim();
    return {Matrix::identity(n) * Complex(1.0 / static_cast<double>(n)), s};
  }

  const Matrix& matrix() const noexcept { return rho_; }
  const PartyStructure& structure() const noexcept { return structure_; }

 private:
  Matrix rho_;
  PartyStructure structure_;
};

inline DensityMatrix::DensityMatrix(Matrix rho, PartyStructure s, const Tolerances& tol)
    : rho_(std::move(rho)), structure_(std::move(s)) {
  if (!rho_.is_square() || rho_.rows() != structure_.total_dim())
    throw InputError("density matrix dimension mismatch");
  if (std::abs(rho_.trace() - Complex(1.0)) > tol.unitarity)
    throw InputError("density matrix must have unit trace");
  const auto spec = eig_hermitian(rho_, tol);
  if (spec.eigenvalues.front() < -tol.unitarity)
    throw InputError("density matrix has a negative eigenvalue");
}

// ---- index bookkeeping ----

/// Mixed-radix digits of a flat index (most significant party first).
inline std::vector<std::size_t> digits_of(std::size_t index, std::span<const std::size_t> dims) {
  std::vector<std::size_t> d(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    d[k] = index % dims[k];
    index /= dims[k];
  }
  return d;
}

inline std::size_t index_of(std::span<const std::size_t> digits,
                            std::span<const std::size_t> dims) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
  return idx;
}

/// Permutation operator P with P|x_0 ... x_{n-1}> = |x_{order[0]} ... x_{order[n-1]}>.
/// The returned matrix maps the structure `dims` to the reordered structure.
inline Matrix party_permutation(std::span<const std::size_t> dims,
                                std::span<const std::size_t> order) {
  if (order.size() != dims.size()) throw InputError("permutation length mismatch");
  std::vector<std::size_t> new_dims(dims.size());
  std::vector<bool> seen(dims.size(), false);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] >= dims.size() || seen[order[k]]) throw InputError("invalid permutation");
    seen[order[k]] = true;
    new_dims[k] = dims[order[k]];
  }
  const std::size_t n = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                        std::multiplies<>());
  Matrix p(n, n);
  std::vector<std::size_t> nd(dims.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = digits_of(i, dims);
    for (std::size_t k = 0; k < order.size(); ++k) nd[k] = d[order[k]];
    p(index_of(nd, new_dims), i) = 1.0;
  }
  return p;
}

inline PartyStructure permuted(const PartyStructure& s, std::span<const std::size_t> order) {
  std::vector<std::size_t> nd;
  for (auto o : order) nd.push_back(s.dim(o));
  return PartyStructure(nd);
}

/// Partial trace keeping the listed parties (in their original order).
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const auto dims = rho.structure().local_dims();
  if (keep.empty()) throw InputError("partial_trace: keep set must be nonempty");
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end() || kept.back() >= dims.size())
    throw InputError("partial_trace: invalid party subset");

  std::vector<std::size_t> traced;
  for (std::size_t p = 0; p < dims.size(); ++p)
    if (!std::binary_search(kept.begin(), kept.end(), p)) traced.push_back(p);

  std::vector<std::size_t> kdims, tdims;
  for (auto p : kept) kdims.push_back(dims[p]);
  for (auto p : traced) tdims.push_back(dims[p]);
  const std::size_t nk = std::accumulate(kdims.begin(), kdims.end(), std::size_t{1}, std::multiplies<>());
  const std::size_t nt = std::accumulate(tdims.begin(), tdims.end(), std::size_t{1}, std::multiplies<>());

  std::vector<std::size_t> full(dims.size());
  auto flat = [&](std::size_t ki, std::size_t ti) {
    const auto kd = digits_of(ki, kdims);
    const auto td = digits_of(ti, tdims);
    for (std::size_t a = 0; a < kept.size(); ++a) full[kept[a]] = kd[a];
    for (std::size_t a = 0; a < traced.size(); ++a) full[traced[a]] = td[a];
    return index_of(full, dims);
  };

  Matrix out(nk, nk);
  const Matrix& m = rho.matrix();
  for (std::size_t i = 0; i < nk; ++i)
    for (std::size_t j = 0; j < nk; ++j) {
      Complex s{};
      for (std::size_t t = 0; t < nt; ++t) s += m(flat(i, t), flat(j, t));
      out(i, j) = s;
    }
  return {out, PartyStructure(kdims)};
}

/// Block-diagonal U (+) I_k; the result is a single party of dimension d + k.
inline UnitaryGate direct_sum(const UnitaryGate& u, std::size_t k) {
  if (k == 0) return u;
  const std::size_t d = u.dim();
  Matrix m(d + k, d + k);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = u.matrix()(i, j);
  for (std::size_t i = d; i < d + k; ++i) m(i, i) = 1.0;
  return {m, PartyStructure::single(d + k)};
}

}  // namespace udiscrim::linalg
