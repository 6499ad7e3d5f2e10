#pragma once

#include <cstdint>
#include <random>

#include "udiscrim/linalg/matrix.hpp"
#include "udiscrim/linalg/structure.hpp"

namespace udiscrim::linalg {

/// SplitMix64 step; used to derive independent child seeds.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// dim x dim matrix of independent standard complex Gaussians.
inline Matrix ginibre(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix m(rows, cols);
  for (auto& z : m.entries()) {
    const double re = normal(gen);
    z = Complex(re, normal(gen));
  }
  return m;
}

/// Haar-distributed unitary: Gram-Schmidt on a seeded Ginibre matrix, which
/// yields the QR factor with real positive diagonal in R.
inline Matrix haar_random_matrix(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw InputError("haar_random_unitary: dim must be positive");
  Matrix g = ginibre(dim, dim, seed);
  std::vector<Vector> q;
  for (std::size_t j = 0; j < dim; ++j) {
    Vector col = g.column(j);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : q) {
        const Complex c = inner(b, col);
        for (std::size_t i = 0; i < dim; ++i) col[i] -= c * b[i];
      }
    const double nn = norm(col);
    for (auto& z : col) z /= nn;
    q.push_back(std::move(col));
  }
  return Matrix::from_columns(q);
}

inline UnitaryGate haar_random_unitary(std::size_t dim, std::uint64_t seed) {
  return UnitaryGate(haar_random_matrix(dim, seed), PartyStructure::single(dim));
}

inline UnitaryGate haar_random_unitary(const PartyStructure& s, std::uint64_t seed) {
  return {haar_random_matrix(s.total_dim(), seed), s};
}

/// Haar-random unit vector.
inline Vector random_state(std::size_t dim, std::uint64_t seed) {
  Matrix g = ginibre(dim, 1, seed);
  Vector v = g.column(0);
  const double nn = norm(v);
  for (auto& z : v) z /= nn;
  return v;
}

/// Random Hermitian matrix (GUE-like).
inline Matrix random_hermitian(std::size_t dim, std::uint64_t seed) {
  const Matrix g = ginibre(dim, dim, seed);
  return (g + g.adjoint()) * Complex(0.5);
}

}  // namespace udiscrim::linalg
