#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "udiscrim/errors.hpp"
#include "udiscrim/linalg/matrix.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::linalg {

/// Real eigenvalues (ascending) with orthonormal eigenvectors as columns.
struct HermitianSpectrum {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

/// Eigenvalues with eigenvectors as columns.
struct Spectrum {
  std::vector<Complex> eigenvalues;
  Matrix eigenvectors;
};

struct SingularValueDecomposition {
  Matrix left;                  // m x k, orthonormal columns
  std::vector<double> values;   // k values, descending
  Matrix right;                 // n x k, orthonormal columns
};

namespace detail {

/// Makes the first entry with modulus above `cutoff` real positive, per column.
inline void canonicalize_phases(Matrix& v, double cutoff = 1e-8) {
  for (std::size_t j = 0; j < v.cols(); ++j) {
    for (std::size_t i = 0; i < v.rows(); ++i) {
      const Complex z = v(i, j);
      if (std::abs(z) > cutoff) {
        const Complex phase = std::conj(z) / std::abs(z);
        for (std::size_t k = 0; k < v.rows(); ++k) v(k, j) *= phase;
        v(i, j) = std::abs(z);
        break;
      }
    }
  }
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
/// Eigenvalues come back ascending.
inline HermitianSpectrum jacobi(Matrix a) {
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);
  const double scale = std::max(1.0, frobenius_norm(a));

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (mag < 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const Complex phase = apq / mag;
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // J = D R D^dag with R the real rotation and D = diag(1, conj(phase)).
        const Complex jpp = c, jpq = s * phase, jqp = -s * std::conj(phase), jqq = c;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });
  HermitianSpectrum out;
  out.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues.push_back(a(order[j], order[j]).real());
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
  }
  return out;
}

/// Consecutive runs of sorted values whose neighbours differ by at most tol.
inline std::vector<std::pair<std::size_t, std::size_t>> degenerate_runs(
    const std::vector<double>& sorted, double tol) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() || sorted[i] - sorted[i - 1] > tol) {
      runs.emplace_back(start, i);
      start = i;
    }
  }
  return runs;
}

/// Rotates columns [begin, end) of `vectors` so they diagonalize `second`
/// inside that subspace.
inline void resolve_subspace(Matrix& vectors, std::size_t begin, std::size_t end,
                             const Matrix& second) {
  const std::size_t g = end - begin;
  if (g < 2) return;
  const std::size_t n = vectors.rows();
  Matrix basis(n, g);
  for (std::size_t j = 0; j < g; ++j) basis.set_column(j, vectors.column(begin + j));
  Matrix compressed = basis.adjoint() * second * basis;
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = i + 1; j < g; ++j) {
      const Complex h = 0.5 * (compressed(i, j) + std::conj(compressed(j, i)));
      compressed(i, j) = h;
      compressed(j, i) = std::conj(h);
    }
    compressed(i, i) = compressed(i, i).real();
  }
  const auto inner = jacobi(compressed);
  const Matrix rotated = basis * inner.eigenvectors;
  for (std::size_t j = 0; j < g; ++j) vectors.set_column(begin + j, rotated.column(j));
}

inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

}  // namespace detail

inline HermitianSpectrum eig_hermitian(const Matrix& h,
                                       const Tolerances& tol = default_tolerances()) {
  if (!h.is_square()) throw InputError("eig_hermitian needs a square matrix");
  const double defect = hermiticity_defect(h);
  if (!(defect <= tol.hermiticity))
    throw InputError("eig_hermitian: matrix is not Hermitian (defect " +
                     std::to_string(defect) + ")");
  auto spec = detail::jacobi(h);
  detail::canonicalize_phases(spec.eigenvectors);
  return spec;
}

/// Spectrum of a unitary. The Hermitian part (U + U^dag)/2 is diagonalized
/// first; near-degenerate eigenspaces of it are split by (U - U^dag)/(2i).
inline Spectrum eig_unitary(const Matrix& u, const Tolerances& tol = default_tolerances()) {
  if (!u.is_square()) throw InputError("eig_unitary needs a square matrix");
  const double defect = unitarity_defect(u);
  if (!(defect <= tol.unitarity))
    throw InputError("eig_unitary: matrix is not unitary (defect " + std::to_string(defect) + ")");

  const Matrix ud = u.adjoint();
  const Matrix re_part = (u + ud) * Complex(0.5);
  const Matrix im_part = (u - ud) * Complex(0.0, -0.5);

  auto first = detail::jacobi(re_part);
  Matrix vecs = first.eigenvectors;
  for (const auto& [b, e] : detail::degenerate_runs(first.eigenvalues, tol.degeneracy))
    detail::resolve_subspace(vecs, b, e, im_part);

  const std::size_t n = u.rows();
  std::vector<Complex> values(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vector col = vecs.column(j);
    const Complex rq = inner(col, u * col);
    values[j] = std::abs(rq) > 0 ? rq / std::abs(rq) : Complex(1.0);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detail::wrap_angle(std::arg(values[a])) < detail::wrap_angle(std::arg(values[b]));
  });
  Spectrum out;
  out.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues.push_back(values[order[j]]);
    out.eigenvectors.set_column(j, vecs.column(order[j]));
  }
  detail::canonicalize_phases(out.eigenvectors);
  return out;
}

/// Thin SVD through the Hermitian eigenproblem of M^dag M. Singular values
/// are taken as |M v| rather than sqrt of the eigenvalue, which keeps tiny
/// values accurate to machine precision.
inline SingularValueDecomposition svd(const Matrix& m,
                                      const Tolerances& tol = default_tolerances()) {
  const std::size_t rows = m.rows(), cols = m.cols();
  const std::size_t k = std::min(rows, cols);
  const Matrix gram = m.adjoint() * m;
  auto spec = detail::jacobi(gram);

  struct Triple {
    double s;
    Vector u, v;
  };
  std::vector<Triple> triples;
  for (std::size_t idx = cols; idx-- > 0;) {
    Vector v = spec.eigenvectors.column(idx);
    Vector mv = m * v;
    const double s = norm(mv);
    triples.push_back({s, std::move(mv), std::move(v)});
  }
  std::stable_sort(triples.begin(), triples.end(),
                   [](const Triple& a, const Triple& b) { return a.s > b.s; });
  triples.resize(k);

  std::vector<Vector> lefts;
  for (auto& t : triples) {
    if (t.s > tol.singular_cutoff) {
      for (auto& z : t.u) z /= t.s;
    } else {
      // Deterministic completion: the standard basis vector with the largest
      // component outside the span so far.
      Vector best;
      double best_norm = -1.0;
      for (std::size_t e = 0; e < rows; ++e) {
        Vector cand = basis_vector(rows, e);
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& l : lefts) {
            const Complex c = inner(l, cand);
            for (std::size_t i = 0; i < rows; ++i) cand[i] -= c * l[i];
          }
        const double nn = norm(cand);
        if (nn > best_norm + 1e-12) {
          best_norm = nn;
          best = std::move(cand);
        }
      }
      for (auto& z : best) z /= best_norm;
      t.u = std::move(best);
    }
    lefts.push_back(t.u);
  }

  SingularValueDecomposition out;
  out.left = Matrix(rows, k);
  out.right = Matrix(cols, k);
  for (std::size_t j = 0; j < k; ++j) {
    out.values.push_back(triples[j].s);
    out.left.set_column(j, triples[j].u);
    out.right.set_column(j, triples[j].v);
  }
  return out;
}

/// exp(iH) for Hermitian H, as V exp(i Lambda) V^dag.
inline Matrix exp_i_hermitian_matrix(const Matrix& h,
                                     const Tolerances& tol = default_tolerances()) {
  const auto spec = eig_hermitian(h, tol);
  const std::size_t n = h.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = std::polar(1.0, spec.eigenvalues[i]);
  return spec.eigenvectors * d * spec.eigenvectors.adjoint();
}

}  // namespace udiscrim::linalg
