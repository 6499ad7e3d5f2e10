#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "udiscrim/errors.hpp"
#include "udiscrim/gateclass/schmidt.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::gateclass {

using linalg::kPi;

struct KakDecomposition {
  Complex global_phase{1.0};
  std::pair<Matrix, Matrix> locals_before;  // (U3, U4)
  std::pair<Matrix, Matrix> locals_after;   // (U1, U2)
  std::array<double, 3> canonical_vector{};  // (hx, hy, hz)

  /// global_phase (U1 (x) U2) exp(i sum_k h_k s_k (x) s_k) (U3 (x) U4)
  Matrix reconstruct() const;
};

/// exp(i (hx XX + hy YY + hz ZZ)); the three terms commute and square to I.
inline Matrix canonical_gate(const std::array<double, 3>& h) {
  const Matrix paulis[3] = {linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()};
  Matrix out = Matrix::identity(4);
  for (int k = 0; k < 3; ++k) {
    const Matrix kk = linalg::tensor(paulis[k], paulis[k]);
    out = out * (Matrix::identity(4) * Complex(std::cos(h[k])) + kk * Complex(0, std::sin(h[k])));
  }
  return out;
}

inline Matrix KakDecomposition::reconstruct() const {
  return global_phase * linalg::tensor(locals_after.first, locals_after.second) *
         canonical_gate(canonical_vector) *
         linalg::tensor(locals_before.first, locals_before.second);
}

namespace detail {

/// Columns are the magic-basis states. M^dag (A (x) B) M is real orthogonal
/// for A, B in SU(2), and every s_k (x) s_k is diagonal in it.
inline Matrix magic_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0, r);
  return {{r, 0, 0, i}, {0, i, r, 0}, {0, i, -r, 0}, {r, 0, 0, -i}};
}

/// Diagonal of M^dag (s_k (x) s_k) M, one row per k.
inline std::array<std::array<double, 4>, 3> magic_signs() {
  const Matrix m = magic_basis();
  const Matrix paulis[3] = {linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()};
  std::array<std::array<double, 4>, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const Matrix d = m.adjoint() * linalg::tensor(paulis[k], paulis[k]) * m;
    for (int j = 0; j < 4; ++j) out[k][j] = d(j, j).real();
  }
  return out;
}

/// Real orthogonal Q (det +1) with Q^T S Q diagonal, for symmetric unitary S.
inline Matrix diagonalize_symmetric_unitary(const Matrix& s, const Tolerances& tol) {
  Matrix re(4, 4), im(4, 4), mix(4, 4);
  // A generic real combination separates eigenvalues that share a real part.
  constexpr double kMix = 0.5772156649015329;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double a = 0.5 * (s(i, j).real() + s(j, i).real());
      const double b = 0.5 * (s(i, j).imag() + s(j, i).imag());
      re(i, j) = a;
      im(i, j) = b;
      mix(i, j) = a + kMix * b;
    }
  auto spec = linalg::detail::jacobi(mix);
  Matrix q = spec.eigenvectors;
  for (const auto& [b, e] : linalg::detail::degenerate_runs(spec.eigenvalues, tol.degeneracy)) {
    linalg::detail::resolve_subspace(q, b, e, im);
    linalg::detail::resolve_subspace(q, b, e, re);
  }
  for (auto& z : q.entries()) z = z.real();
  // Re-orthonormalize the real columns.
  for (std::size_t j = 0; j < 4; ++j) {
    linalg::Vector c = q.column(j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        const linalg::Vector prev = q.column(k);
        const Complex proj = linalg::inner(prev, c);
        for (std::size_t i = 0; i < 4; ++i) c[i] -= proj * prev[i];
      }
    const double n = linalg::norm(c);
    if (n < 1e-6) throw NumericalFailure("kak: degenerate orthogonal eigenbasis");
    for (auto& z : c) z /= n;
    q.set_column(j, c);
  }
  if (linalg::determinant(q).real() < 0)
    for (std::size_t i = 0; i < 4; ++i) q(i, 0) = -q(i, 0);
  return q;
}

inline void shift(KakDecomposition& k, int axis, double amount_over_half_pi) {
  // exp(i h P) = exp(i (h + s pi/2) P) (-i)^s P^s for P = s_k (x) s_k.
  const int steps = static_cast<int>(std::lround(amount_over_half_pi));
  if (steps == 0) return;
  const Matrix paulis[3] = {linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()};
  k.canonical_vector[axis] += steps * kPi / 2;
  const int odd = ((steps % 2) + 2) % 2;
  const int quarter = ((steps % 4) + 4) % 4;
  static const Complex minus_i_pow[4] = {1.0, Complex(0, -1), -1.0, Complex(0, 1)};
  k.global_phase *= minus_i_pow[quarter];
  if (odd) {
    k.locals_before.first = paulis[axis] * k.locals_before.first;
    k.locals_before.second = paulis[axis] * k.locals_before.second;
  }
}

/// Negates the two coordinates other than `keep` by conjugating with s_keep (x) I.
inline void flip_pair(KakDecomposition& k, int keep) {
  const Matrix paulis[3] = {linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()};
  for (int a = 0; a < 3; ++a)
    if (a != keep) k.canonical_vector[a] = -k.canonical_vector[a];
  k.locals_after.first = k.locals_after.first * paulis[keep];
  k.locals_before.first = paulis[keep] * k.locals_before.first;
}

/// Exchanges the two coordinates other than `axis` with K (x) K,
/// K = (I - i s_axis)/sqrt(2).
inline void swap_pair(KakDecomposition& k, int axis) {
  const Matrix paulis[3] = {linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()};
  const Matrix kk = (Matrix::identity(2) - paulis[axis] * Complex(0, 1)) *
                    Complex(1.0 / std::sqrt(2.0));
  int a = (axis + 1) % 3, b = (axis + 2) % 3;
  std::swap(k.canonical_vector[a], k.canonical_vector[b]);
  k.locals_after.first = k.locals_after.first * kk.adjoint();
  k.locals_after.second = k.locals_after.second * kk.adjoint();
  k.locals_before.first = kk * k.locals_before.first;
  k.locals_before.second = kk * k.locals_before.second;
}

/// Moves the canonical vector into pi/4 >= hx >= hy >= |hz|.
inline void to_weyl_chamber(KakDecomposition& k) {
  auto& h = k.canonical_vector;
  for (int a = 0; a < 3; ++a) {
    // into (-pi/4, pi/4]
    const double s = std::floor((h[a] + kPi / 4) / (kPi / 2));
    double shifted = h[a] - s * kPi / 2;
    double steps = -s;
    if (shifted <= -kPi / 4) steps += 1;
    shift(k, a, steps);
  }
  // sort by magnitude, descending (bubble sort via coordinate swaps)
  for (int pass = 0; pass < 2; ++pass)
    for (int a = 0; a < 2; ++a)
      if (std::abs(h[a]) < std::abs(h[a + 1])) swap_pair(k, 3 - a - (a + 1));
  if (h[0] < 0 && h[1] < 0) {
    flip_pair(k, 2);
  } else if (h[0] < 0) {
    flip_pair(k, 1);
  } else if (h[1] < 0) {
    flip_pair(k, 0);
  }
  if (h[0] > kPi / 4 - 1e-12 && h[2] < 0) {
    shift(k, 0, -1);
    flip_pair(k, 1);
  }
}

}  // namespace detail

/// Canonical decomposition of a two-qubit gate.
inline KakDecomposition kak_decompose(const UnitaryGate& u,
                                      const Tolerances& tol = default_tolerances()) {
  const auto dims = u.structure().local_dims();
  if (dims.size() != 2 || dims[0] != 2 || dims[1] != 2)
    throw InputError("kak_decompose needs a two-qubit gate with dims [2,2]");

  const Complex det = linalg::determinant(u.matrix());
  const Complex quarter = std::polar(1.0, std::arg(det) / 4);
  const Matrix us = u.matrix() * (1.0 / quarter);
  const Matrix m = detail::magic_basis();
  const Matrix up = m.adjoint() * us * m;
  const Matrix q = detail::diagonalize_symmetric_unitary(up.transpose() * up, tol);
  const Matrix diag_s = q.transpose() * up.transpose() * up * q;

  std::array<double, 4> phi{};
  for (std::size_t j = 0; j < 4; ++j) phi[j] = std::arg(diag_s(j, j)) / 2;
  double total = 0;
  for (double p : phi) total += p;
  // det D must be +1 so that the left factor lands in SO(4).
  const double k_pi = std::round(total / kPi);
  if (static_cast<long>(k_pi) % 2 != 0) phi[0] += kPi;

  Matrix dinv(4, 4);
  for (std::size_t j = 0; j < 4; ++j) dinv(j, j) = std::polar(1.0, -phi[j]);
  Matrix o1 = up * q * dinv;
  for (auto& z : o1.entries()) z = z.real();

  KakDecomposition k;
  const auto signs = detail::magic_signs();
  double c0 = 0;
  for (double p : phi) c0 += p / 4;
  for (int a = 0; a < 3; ++a) {
    double h = 0;
    for (int j = 0; j < 4; ++j) h += signs[a][j] * phi[j] / 4;
    k.canonical_vector[a] = h;
  }
  k.global_phase = quarter * std::polar(1.0, c0);
  k.locals_after = detail::factor_product(m * o1 * m.adjoint(), 2, 2, tol);
  k.locals_before = detail::factor_product(m * q.transpose() * m.adjoint(), 2, 2, tol);

  detail::to_weyl_chamber(k);
  const double err = linalg::max_abs_diff(k.reconstruct(), u.matrix());
  if (!(err <= 1e-9))
    throw NumericalFailure("kak_decompose: reconstruction error " + std::to_string(err));
  return k;
}

inline std::array<double, 3> canonical_class(const UnitaryGate& u,
                                             const Tolerances& tol = default_tolerances()) {
  return kak_decompose(u, tol).canonical_vector;
}

}  // namespace udiscrim::gateclass
