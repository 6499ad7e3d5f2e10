#pragma once

// Unit vectors with a prescribed value of <v|M|v>, built from a set of
// candidate vectors whose values surround the target.

#include <cmath>
#include <optional>
#include <vector>

#include "udiscrim/linalg.hpp"

namespace udiscrim::protocol::numrange {

using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

inline Complex rayleigh(const Matrix& m, const Vector& v) { return linalg::inner(v, m * v); }

/// Unit v in C^2 with v^dag C v = 0, assuming 0 lies in the numerical range of C.
inline Vector zero_2x2(const Matrix& c) {
  const Matrix h1 = (c + c.adjoint()) * Complex(0.5);
  const Matrix h2 = (c - c.adjoint()) * Complex(0, -0.5);
  const double scale = std::max(1e-300, linalg::max_abs(c));

  auto split = [](double lo, double hi) {
    // cos^2 t lo + sin^2 t hi = 0
    if (hi - lo <= 0) return std::pair{1.0, 0.0};
    const double s2 = std::clamp(-lo / (hi - lo), 0.0, 1.0);
    return std::pair{std::sqrt(1 - s2), std::sqrt(s2)};
  };

  const auto e1 = linalg::detail::jacobi(h1);
  if (std::max(std::abs(e1.eigenvalues[0]), std::abs(e1.eigenvalues[1])) <= 1e-14 * scale) {
    const auto e2 = linalg::detail::jacobi(h2);
    const auto [cs, sn] = split(e2.eigenvalues[0], e2.eigenvalues[1]);
    Vector v(2);
    for (int i = 0; i < 2; ++i) v[i] = cs * e2.eigenvectors(i, 0) + sn * e2.eigenvectors(i, 1);
    return v;
  }
  const auto [cs, sn] = split(e1.eigenvalues[0], e1.eigenvalues[1]);
  const Vector q1 = e1.eigenvectors.column(0), q2 = e1.eigenvectors.column(1);
  const double h11 = rayleigh(h2, q1).real(), h22 = rayleigh(h2, q2).real();
  const Complex h12 = linalg::inner(q1, h2 * q2);
  const double base = cs * cs * h11 + sn * sn * h22;
  const double amp = 2 * cs * sn * std::abs(h12);
  double phi = 0;
  if (amp > 1e-300) phi = std::acos(std::clamp(-base / amp, -1.0, 1.0)) - std::arg(h12);
  const Complex e = std::polar(1.0, phi);
  return {cs * q1[0] + e * sn * q2[0], cs * q1[1] + e * sn * q2[1]};
}

/// Unit v in span{x, y} with <v|M|v> = target; target must lie on the
/// segment between the values of x and y.
inline Vector solve_on_pair(const Matrix& m, const Vector& x, const Vector& y, Complex target) {
  Vector e1 = x;
  const double nx = linalg::norm(e1);
  for (auto& z : e1) z /= nx;
  Vector e2 = y;
  const Complex p = linalg::inner(e1, e2);
  for (std::size_t i = 0; i < e2.size(); ++i) e2[i] -= p * e1[i];
  const double n2 = linalg::norm(e2);
  if (n2 < 1e-12) return e1;
  for (auto& z : e2) z /= n2;
  const Vector me1 = m * e1, me2 = m * e2;
  Matrix c{{linalg::inner(e1, me1) - target, linalg::inner(e1, me2)},
           {linalg::inner(e2, me1), linalg::inner(e2, me2) - target}};
  const Vector w = zero_2x2(c);
  Vector v(e1.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[0] * e1[i] + w[1] * e2[i];
  const double nv = linalg::norm(v);
  for (auto& z : v) z /= nv;
  return v;
}

namespace detail {
inline double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
}  // namespace detail

/// Unit v with <v|M|v> = 0, combining at most three candidates whose values
/// contain 0 in their convex hull. nullopt when they do not.
inline std::optional<Vector> find_zero(const Matrix& m, const std::vector<Vector>& candidates,
                                       double slack = 1e-12) {
  const std::size_t n = candidates.size();
  if (n == 0) return std::nullopt;
  std::vector<Complex> z(n);
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = rayleigh(m, candidates[i]);
    scale = std::max(scale, std::abs(z[i]));
  }
  if (scale == 0) return candidates[0];
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(z[i]) <= 1e-15 * scale) return candidates[i];

  // Best triangle: largest minimum barycentric coordinate of 0.
  double best = -slack;
  std::size_t bi = n, bj = n, bk = n;
  double li = 0, lj = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const Complex e1 = z[j] - z[i], e2 = z[k] - z[i];
        const double det = detail::cross(e1, e2);
        if (std::abs(det) <= 1e-14 * scale * scale) continue;
        const double s = detail::cross(-z[i], e2) / det;
        const double t = detail::cross(e1, -z[i]) / det;
        const double mn = std::min({1 - s - t, s, t});
        if (mn > best) {
          best = mn;
          bi = i, bj = j, bk = k;
          li = std::max(0.0, 1 - s - t), lj = std::max(0.0, s);
        }
      }
  if (bi < n) {
    if (li + lj <= 0) return candidates[bk];
    const Complex w = (li * z[bi] + lj * z[bj]) / (li + lj);
    const Vector u = solve_on_pair(m, candidates[bi], candidates[bj], w);
    return solve_on_pair(m, u, candidates[bk], 0.0);
  }

  // Collinear values: a pair on opposite sides of 0.
  double best_dist = slack * scale;
  std::size_t pi = n, pj = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((z[i] * std::conj(z[j])).real() >= 0) continue;
      const double dist = std::abs(detail::cross(z[i], z[j])) / std::abs(z[j] - z[i]);
      if (dist <= best_dist) {
        best_dist = dist;
        pi = i, pj = j;
      }
    }
  if (pi == n) return std::nullopt;
  return solve_on_pair(m, candidates[pi], candidates[pj], 0.0);
}

/// Boundary points of the numerical range of M in `angles` directions:
/// top eigenvectors of Re(e^{-i theta} M). Also reports min over theta of
/// the support value, which is >= 0 exactly when 0 is inside (up to grid).
struct Boundary {
  std::vector<Vector> vectors;
  double min_support = 0;
  Vector closest;  // boundary vector in the direction of least support
};

inline Boundary boundary(const Matrix& m, std::size_t angles) {
  Boundary b;
  b.min_support = INFINITY;
  for (std::size_t a = 0; a < angles; ++a) {
    const double theta = linalg::kTwoPi * static_cast<double>(a) / static_cast<double>(angles);
    const Complex e = std::polar(1.0, -theta);
    const Matrix r = (m * e + m.adjoint() * std::conj(e)) * Complex(0.5);
    const auto spec = linalg::detail::jacobi(r);
    const std::size_t top = spec.eigenvalues.size() - 1;
    Vector v = spec.eigenvectors.column(top);
    if (spec.eigenvalues[top] < b.min_support) {
      b.min_support = spec.eigenvalues[top];
      b.closest = v;
    }
    b.vectors.push_back(std::move(v));
  }
  return b;
}

}  // namespace udiscrim::protocol::numrange
