#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "udiscrim/errors.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/protocol/numrange.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::protocol {

using linalg::Complex;
using linalg::Matrix;
using linalg::PureState;
using linalg::UnitaryGate;
using linalg::Vector;

/// Alice measures in `alice_vectors` (columns a_k) and announces k; Bob then
/// projects onto bob_vectors[k]. A click means hypothesis bob_click_label[k],
/// no click means the other one.
struct WalgateMeasurement {
  Matrix alice_vectors;
  std::vector<Vector> bob_vectors;
  std::vector<int> bob_click_label;
  double cost = 0.0;  // sum_k |<eta_k|nu_k>|^2
};

namespace detail {

/// Orthonormal basis of the complement of unit u in C^m, as m x (m-1) columns.
inline Matrix complement_basis(const Vector& u) {
  const std::size_t m = u.size();
  std::size_t skip = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (std::abs(u[i]) > std::abs(u[skip])) skip = i;
  std::vector<Vector> cols{u};
  for (std::size_t e = 0; e < m; ++e) {
    if (e == skip) continue;
    Vector c = linalg::basis_vector(m, e);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& prev : cols) {
        const Complex p = linalg::inner(prev, c);
        for (std::size_t i = 0; i < m; ++i) c[i] -= p * prev[i];
      }
    const double n = linalg::norm(c);
    for (auto& z : c) z /= n;
    cols.push_back(std::move(c));
  }
  cols.erase(cols.begin());
  return Matrix::from_columns(cols);
}

/// Orthonormal basis {b_k} with b_k^dag K b_k = 0 for traceless K, built one
/// vector at a time: each step finds a zero of the compressed form and
/// recurses on its orthogonal complement, whose trace stays zero.
inline std::vector<Vector> zero_diagonal_basis(const Matrix& k) {
  const std::size_t d = k.rows();
  Matrix s = Matrix::identity(d);
  std::vector<Vector> out;
  for (std::size_t m = d; m >= 2; --m) {
    const Matrix kc = s.adjoint() * k * s;
    std::vector<Vector> cands;
    for (std::size_t e = 0; e < m; ++e) cands.push_back(linalg::basis_vector(m, e));
    auto u = numrange::find_zero(kc, cands, 1e-9);
    if (!u) throw NoBasisFound("walgate: no zero found in the compressed numerical range");
    out.push_back(s * *u);
    s = s * complement_basis(*u);
  }
  out.push_back(s.column(0));
  return out;
}

}  // namespace detail

/// Core construction on coefficient matrices: psi_h = sum Psi_h[i][j] |i>_A |j>_B.
inline WalgateMeasurement walgate_from_coefficients(const Matrix& psi0, const Matrix& psi1,
                                                    const Tolerances& tol = default_tolerances()) {
  const Matrix k = psi0.conjugate() * psi1.transpose();
  const auto b = detail::zero_diagonal_basis(k);
  WalgateMeasurement w;
  const std::size_t da = psi0.rows();
  w.alice_vectors = Matrix(da, da);
  for (std::size_t j = 0; j < da; ++j) {
    Vector a = b[j];
    for (auto& z : a) z = std::conj(z);
    w.alice_vectors.set_column(j, a);
    const Vector eta = psi0.transpose() * b[j];
    const Vector nu = psi1.transpose() * b[j];
    w.cost += std::norm(linalg::inner(eta, nu));
    const double ne = linalg::norm(eta), nn = linalg::norm(nu);
    Vector proj = ne >= nn ? eta : nu;
    const double np = std::max(ne, nn);
    if (np > 0) {
      for (auto& z : proj) z /= np;
    } else {
      proj = linalg::basis_vector(psi0.cols(), 0);
    }
    w.bob_vectors.push_back(std::move(proj));
    w.bob_click_label.push_back(ne >= nn ? 0 : 1);
  }
  if (!(w.cost <= tol.walgate_cost))
    throw NoBasisFound("walgate: verification cost " + std::to_string(w.cost) + " above " +
                       std::to_string(tol.walgate_cost));
  return w;
}

/// Probability that the measurement names hypothesis `label` when the
/// state has coefficient matrix psi.
inline double verdict_probability(const WalgateMeasurement& w, const Matrix& psi, int label) {
  double p = 0;
  for (std::size_t k = 0; k < w.bob_vectors.size(); ++k) {
    Vector a = w.alice_vectors.column(k);
    for (auto& z : a) z = std::conj(z);
    const Vector cond = psi.transpose() * a;
    const double total = std::pow(linalg::norm(cond), 2);
    const double click = std::norm(linalg::inner(w.bob_vectors[k], cond));
    p += w.bob_click_label[k] == label ? click : total - click;
  }
  return p;
}

/// Coefficient matrix of a state across the cut side_a | rest.
inline Matrix coefficient_matrix(const PureState& psi, std::span<const std::size_t> side_a) {
  const auto& s = psi.structure();
  const std::size_t n = s.parties();
  std::vector<bool> in_a(n, false);
  for (auto p : side_a) {
    if (p >= n || in_a[p]) throw InputError("invalid cut");
    in_a[p] = true;
  }
  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < n; ++p)
    if (in_a[p]) order.push_back(p);
  const std::size_t na = order.size();
  for (std::size_t p = 0; p < n; ++p)
    if (!in_a[p]) order.push_back(p);
  if (na == 0 || na == n) throw InputError("cut sides must both be nonempty");
  const Vector v = linalg::party_permutation(s.local_dims(), order) * psi.vector();
  std::size_t da = 1;
  for (std::size_t k = 0; k < na; ++k) da *= s.dim(order[k]);
  const std::size_t db = s.total_dim() / da;
  Matrix m(da, db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) m(i, j) = v[i * db + j];
  return m;
}

struct WalgateResult {
  UnitaryGate alice_basis;  // columns are Alice's measurement vectors
  double certified_cost = 0.0;
  WalgateMeasurement measurement;
};

/// LOCC measurement that perfectly separates two orthogonal pure states.
inline WalgateResult walgate_measurement(const PureState& psi0, const PureState& psi1,
                                         std::span<const std::size_t> side_a,
                                         const Tolerances& tol = default_tolerances()) {
  if (psi0.structure() != psi1.structure()) throw InputError("walgate: state structures differ");
  const double overlap = std::abs(linalg::inner(psi0.vector(), psi1.vector()));
  if (!(overlap <= tol.overlap))
    throw InputError("walgate: states are not orthogonal (overlap " + std::to_string(overlap) + ")");
  const Matrix c0 = coefficient_matrix(psi0, side_a), c1 = coefficient_matrix(psi1, side_a);
  auto m = walgate_from_coefficients(c0, c1, tol);
  const std::size_t da = c0.rows();
  UnitaryGate basis(m.alice_vectors, linalg::PartyStructure::single(std::max<std::size_t>(da, 2)));
  return {basis, m.cost, std::move(m)};
}

inline WalgateResult walgate_measurement(const PureState& psi0, const PureState& psi1,
                                         std::initializer_list<std::size_t> side_a,
                                         const Tolerances& tol = default_tolerances()) {
  return walgate_measurement(psi0, psi1, std::span<const std::size_t>(side_a.begin(), side_a.size()),
                             tol);
}

}  // namespace udiscrim::protocol
