#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "udiscrim/linalg.hpp"
#include "udiscrim/protocol/numrange.hpp"

namespace udiscrim::protocol {

using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

/// Largest (dA dB)^n handled by the dense parallel search.
inline constexpr std::size_t kMaxParallelDim = 1024;

namespace detail {

/// Y^(x)n reordered so that all A factors come first: rows (a1..an, b1..bn).
inline Matrix party_grouped_power(const Matrix& y, std::size_t da, std::size_t db, std::size_t n) {
  const Matrix t = linalg::tensor_power(y, n);
  std::size_t dan = 1, dbn = 1;
  for (std::size_t k = 0; k < n; ++k) dan *= da, dbn *= db;
  const std::size_t dim = dan * dbn;
  // grouped index -> interleaved index
  std::vector<std::size_t> map(dim);
  for (std::size_t g = 0; g < dim; ++g) {
    std::size_t a = g / dbn, b = g % dbn, idx = 0, pa = dan, pb = dbn;
    for (std::size_t k = 0; k < n; ++k) {
      pa /= da, pb /= db;
      const std::size_t ak = (a / pa) % da, bk = (b / pb) % db;
      idx = (idx * da + ak) * db + bk;
    }
    map[g] = idx;
  }
  Matrix x(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) x(r, c) = t(map[r], map[c]);
  return x;
}

/// (I (x) <b|) X (I (x) |b>).
inline Matrix reduce_bob(const Matrix& x, const Vector& b, std::size_t dan) {
  const std::size_t dbn = b.size();
  Matrix m(dan, dan);
  for (std::size_t i = 0; i < dan; ++i)
    for (std::size_t k = 0; k < dan; ++k) {
      Complex s{};
      for (std::size_t j = 0; j < dbn; ++j) {
        if (b[j] == Complex{}) continue;
        Complex row{};
        for (std::size_t l = 0; l < dbn; ++l) row += x(i * dbn + j, k * dbn + l) * b[l];
        s += std::conj(b[j]) * row;
      }
      m(i, k) = s;
    }
  return m;
}

/// (<a| (x) I) X (|a> (x) I).
inline Matrix reduce_alice(const Matrix& x, const Vector& a, std::size_t dbn) {
  const std::size_t dan = a.size();
  Matrix m(dbn, dbn);
  for (std::size_t i = 0; i < dan; ++i) {
    if (a[i] == Complex{}) continue;
    for (std::size_t k = 0; k < dan; ++k) {
      if (a[k] == Complex{}) continue;
      const Complex w = std::conj(a[i]) * a[k];
      for (std::size_t j = 0; j < dbn; ++j)
        for (std::size_t l = 0; l < dbn; ++l) m(j, l) += w * x(i * dbn + j, k * dbn + l);
    }
  }
  return m;
}

/// Zero of the numerical range of m, or the boundary vector nearest to it.
inline std::pair<std::optional<Vector>, Vector> try_side(const Matrix& m) {
  for (std::size_t angles : {24, 96}) {
    auto b = numrange::boundary(m, angles);
    const double scale = std::max(1.0, linalg::max_abs(m));
    if (b.min_support < -1e-12 * scale) return {std::nullopt, b.closest};
    if (auto v = numrange::find_zero(m, b.vectors)) return {v, b.closest};
  }
  return {std::nullopt, numrange::boundary(m, 24).closest};
}

}  // namespace detail

/// Pure product input a (x) b on n copies with <a,b| Y^(x)n |a,b> = 0, found
/// by alternating numerical-range steps from several starting points.
inline std::optional<std::pair<Vector, Vector>> find_local_input(const Matrix& y, std::size_t da,
                                                                 std::size_t db, std::size_t n,
                                                                 std::uint64_t seed,
                                                                 double tol = 1e-10) {
  std::size_t dan = 1, dbn = 1;
  for (std::size_t k = 0; k < n; ++k) dan *= da, dbn *= db;
  if (dan * dbn > kMaxParallelDim) return std::nullopt;
  const Matrix x = detail::party_grouped_power(y, da, db, n);

  auto value = [&](const Vector& a, const Vector& b) {
    return std::abs(linalg::inner(a, detail::reduce_bob(x, b, dan) * a));
  };

  std::vector<Vector> starts;
  for (std::size_t j = 0; j < std::min<std::size_t>(dbn, 4); ++j)
    starts.push_back(linalg::basis_vector(dbn, j));
  {
    Vector u(dbn, Complex(1.0 / std::sqrt(static_cast<double>(dbn))));
    starts.push_back(u);
  }
  for (std::uint64_t r = 0; r < 6; ++r) starts.push_back(linalg::random_state(dbn, linalg::split_seed(seed, r)));

  for (const auto& start : starts) {
    Vector b = start;
    for (int iter = 0; iter < 12; ++iter) {
      auto [za, ca] = detail::try_side(detail::reduce_bob(x, b, dan));
      if (za && value(*za, b) <= tol) return std::pair{*za, b};
      const Vector a = ca;
      auto [zb, cb] = detail::try_side(detail::reduce_alice(x, a, dbn));
      if (zb && value(a, *zb) <= tol) return std::pair{a, *zb};
      b = cb;
    }
  }
  return std::nullopt;
}

}  // namespace udiscrim::protocol
