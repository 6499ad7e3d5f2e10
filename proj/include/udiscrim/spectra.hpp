#pragma once

// Spectral distinguishability of unitary pairs: covering arcs of eigen-angle
// sumsets, run counts, orthogonalizing inputs and the control-unitary trace.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "udiscrim/errors.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::spectra {

using linalg::Complex;
using linalg::kPi;
using linalg::kTwoPi;
using linalg::Matrix;
using linalg::UnitaryGate;
using linalg::Vector;

struct ArcReport {
  std::vector<double> angles;  // sorted, deduplicated, in [0, 2pi)
  double delta = 0.0;          // covering-arc length
  double largest_gap = kTwoPi;
  bool distinguishable_now = false;
};

/// Superposition of product vectors: sum_j c_j f_j1 (x) f_j2 (x) ... (x) f_jN.
/// Lets N-fold inputs be handled without materializing d^N amplitudes.
struct TensorProductState {
  std::vector<Complex> coefficients;
  std::vector<std::vector<Vector>> factors;

  std::size_t copies() const { return factors.empty() ? 0 : factors.front().size(); }

  Vector dense() const {
    Vector out;
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
      Vector term{coefficients[j]};
      for (const auto& f : factors[j]) term = linalg::kron(term, f);
      if (out.empty()) out.assign(term.size(), Complex{});
      for (std::size_t i = 0; i < term.size(); ++i) out[i] += term[i];
    }
    return out;
  }
};

struct RunPlan {
  std::optional<std::size_t> n_runs;  // nullopt: not distinguishable within max_n
  double delta_single = 0.0;          // covering arc of W itself
  std::optional<std::size_t> ceiling_rule;  // ceil(pi / delta_single) when delta_single > 0
  std::vector<double> arc_per_level;  // arc of the n-fold sumset, n = 1..
  TensorProductState input_state;     // empty when not distinguishable
  double certified_overlap = 0.0;     // |<psi| W^(x)N |psi>| by direct application

  bool distinguishable() const { return n_runs.has_value(); }
};

namespace detail {

inline constexpr std::size_t kSumsetCap = 4096;

/// A point of the sumset together with the eigen-index tuple that produces it.
struct SumPoint {
  double angle;
  std::vector<std::uint16_t> witness;
};

inline void sort_and_merge(std::vector<SumPoint>& pts, double merge_tol) {
  std::sort(pts.begin(), pts.end(),
            [](const SumPoint& a, const SumPoint& b) { return a.angle < b.angle; });
  std::vector<SumPoint> out;
  for (auto& p : pts) {
    if (!out.empty() && p.angle - out.back().angle <= merge_tol) continue;
    out.push_back(std::move(p));
  }
  if (out.size() > 1 && out.front().angle + kTwoPi - out.back().angle <= merge_tol) out.pop_back();
  pts = std::move(out);
}

inline std::pair<double, std::size_t> largest_gap(const std::vector<double>& sorted) {
  if (sorted.size() < 2) return {kTwoPi, 0};
  double best = sorted.front() + kTwoPi - sorted.back();
  std::size_t at = sorted.size() - 1;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double g = sorted[i + 1] - sorted[i];
    if (g > best) {
      best = g;
      at = i;
    }
  }
  return {best, at};
}

inline ArcReport arc_of_sorted(std::vector<double> angles, const Tolerances& tol) {
  ArcReport r;
  r.angles = std::move(angles);
  if (r.angles.size() >= 2) {
    r.largest_gap = largest_gap(r.angles).first;
    r.delta = kTwoPi - r.largest_gap;
  } else {
    r.largest_gap = kTwoPi;
    r.delta = 0.0;
  }
  r.distinguishable_now = r.delta >= kPi - tol.arc_slack;
  return r;
}

inline std::vector<double> angles_of(const std::vector<SumPoint>& pts) {
  std::vector<double> a;
  a.reserve(pts.size());
  for (const auto& p : pts) a.push_back(p.angle);
  return a;
}

/// Keeps the endpoints of the largest gap plus a uniform subsample.
inline void thin(std::vector<SumPoint>& pts) {
  if (pts.size() <= kSumsetCap) return;
  const auto [gap, at] = largest_gap(angles_of(pts));
  const std::size_t m = pts.size();
  const std::size_t step = (m + kSumsetCap - 3) / (kSumsetCap - 2);
  std::vector<SumPoint> kept;
  for (std::size_t i = 0; i < m; ++i)
    if (i % step == 0 || i == at || i == (at + 1) % m) kept.push_back(pts[i]);
  pts = std::move(kept);
}

/// Base level: distinct eigen-angles with a representative eigen-index.
inline std::vector<SumPoint> base_level(std::span<const Complex> eigenvalues,
                                        const Tolerances& tol) {
  std::vector<SumPoint> pts;
  for (std::size_t j = 0; j < eigenvalues.size(); ++j)
    pts.push_back({linalg::detail::wrap_angle(std::arg(eigenvalues[j])),
                   {static_cast<std::uint16_t>(j)}});
  sort_and_merge(pts, tol.angle_merge);
  return pts;
}

inline std::vector<SumPoint> next_level(const std::vector<SumPoint>& level,
                                        const std::vector<SumPoint>& base,
                                        const Tolerances& tol) {
  std::vector<SumPoint> out;
  out.reserve(level.size() * base.size());
  for (const auto& a : level)
    for (const auto& b : base) {
      SumPoint p{linalg::detail::wrap_angle(a.angle + b.angle), a.witness};
      p.witness.push_back(b.witness.front());
      out.push_back(std::move(p));
    }
  sort_and_merge(out, tol.angle_merge);
  thin(out);
  return out;
}

inline void check_unit_modulus(std::span<const Complex> eigenvalues, const Tolerances& tol) {
  if (eigenvalues.empty()) throw InputError("covering_arc: empty eigenvalue list");
  for (const auto& l : eigenvalues)
    if (std::abs(std::abs(l) - 1.0) > tol.unit_modulus)
      throw InputError("covering_arc: eigenvalue off the unit circle");
}

/// Arc of the n-fold sumset for n = 1..levels.
inline std::vector<ArcReport> sumset_arcs(std::span<const Complex> eigenvalues,
                                          std::size_t levels, const Tolerances& tol) {
  std::vector<ArcReport> arcs;
  const auto base = base_level(eigenvalues, tol);
  auto level = base;
  for (std::size_t n = 1; n <= levels; ++n) {
    if (n > 1) level = next_level(level, base, tol);
    arcs.push_back(arc_of_sorted(angles_of(level), tol));
  }
  return arcs;
}

inline std::vector<SumPoint> sumset_level(std::span<const Complex> eigenvalues, std::size_t n,
                                          const Tolerances& tol) {
  const auto base = base_level(eigenvalues, tol);
  auto level = base;
  for (std::size_t k = 1; k < n; ++k) level = next_level(level, base, tol);
  return level;
}

/// Convex weights over three points of the plane summing to zero, or empty.
inline std::vector<double> barycentric_zero(Complex a, Complex b, Complex c) {
  // p_a (a - c) + p_b (b - c) = -c, p_c = 1 - p_a - p_b.
  const Complex u = a - c, v = b - c, w = -c;
  const double det = u.real() * v.imag() - u.imag() * v.real();
  if (std::abs(det) < 1e-300) return {};
  const double pa = (w.real() * v.imag() - w.imag() * v.real()) / det;
  const double pb = (u.real() * w.imag() - u.imag() * w.real()) / det;
  return {pa, pb, 1.0 - pa - pb};
}

inline std::size_t ceil_ratio(double num, double den) {
  return static_cast<std::size_t>(std::ceil(num / den - 1e-9));
}

}  // namespace detail

/// Covering arc of unit-modulus eigenvalues.
inline ArcReport covering_arc(std::span<const Complex> eigenvalues,
                              const Tolerances& tol = default_tolerances()) {
  detail::check_unit_modulus(eigenvalues, tol);
  return detail::sumset_arcs(eigenvalues, 1, tol).front();
}

inline ArcReport covering_arc(std::initializer_list<Complex> eigenvalues,
                              const Tolerances& tol = default_tolerances()) {
  return covering_arc(std::span<const Complex>(eigenvalues.begin(), eigenvalues.size()), tol);
}

/// Covering arc of the n-fold eigen-angle sumset of `u`.
inline ArcReport sumset_arc(const Matrix& u, std::size_t n,
                            const Tolerances& tol = default_tolerances()) {
  const auto spec = linalg::eig_unitary(u, tol);
  return detail::sumset_arcs(spec.eigenvalues, n, tol).back();
}

/// |<psi| W^(x)N |psi>| computed factor by factor with W applied directly.
inline Complex power_expectation(const Matrix& w, const TensorProductState& psi) {
  Complex total{};
  const std::size_t terms = psi.coefficients.size();
  std::vector<std::vector<Vector>> applied(terms);
  for (std::size_t b = 0; b < terms; ++b)
    for (const auto& f : psi.factors[b]) applied[b].push_back(w * f);
  for (std::size_t a = 0; a < terms; ++a)
    for (std::size_t b = 0; b < terms; ++b) {
      Complex prod = std::conj(psi.coefficients[a]) * psi.coefficients[b];
      for (std::size_t k = 0; k < psi.factors[a].size(); ++k)
        prod *= linalg::inner(psi.factors[a][k], applied[b][k]);
      total += prod;
    }
  return total;
}

/// Input on N copies whose image under W^(x)N is orthogonal to itself.
/// Throws NotDistinguishableError if the N-fold covering arc is below pi.
inline TensorProductState orthogonal_input(const Matrix& w, std::size_t copies,
                                           const Tolerances& tol = default_tolerances()) {
  if (copies == 0) throw InputError("orthogonal_input: N must be positive");
  const auto spec = linalg::eig_unitary(w, tol);
  const auto level = detail::sumset_level(spec.eigenvalues, copies, tol);
  const auto angles = detail::angles_of(level);
  const auto arc = detail::arc_of_sorted(angles, tol);
  if (!arc.distinguishable_now)
    throw NotDistinguishableError("orthogonal_input: covering arc of the " +
                                  std::to_string(copies) + "-fold spectrum is below pi");

  std::vector<std::size_t> chosen;
  std::vector<double> weights;
  const std::size_t m = level.size();
  const double antipodal_tol = tol.arc_slack + 1e-12;
  for (std::size_t i = 0; i < m && chosen.empty(); ++i) {
    const double target = angles[i] + kPi;
    for (double t : {target, target - kTwoPi}) {
      auto it = std::lower_bound(angles.begin(), angles.end(), t - antipodal_tol);
      if (it != angles.end() && std::abs(*it - t) <= antipodal_tol) {
        chosen = {i, static_cast<std::size_t>(it - angles.begin())};
        weights = {0.5, 0.5};
        break;
      }
    }
  }
  if (chosen.empty()) {
    // Largest gap is below pi: the points just before and just after the
    // antipode of angles[0] form, with it, a triangle containing 0.
    std::vector<double> unrolled = angles;
    for (double a : angles) unrolled.push_back(a + kTwoPi);
    const double antipode = angles[0] + kPi;
    const auto after = static_cast<std::size_t>(
        std::upper_bound(unrolled.begin(), unrolled.end(), antipode) - unrolled.begin());
    if (after < 2 || after >= unrolled.size())
      throw NumericalFailure("orthogonal_input: failed to bracket the antipode");
    chosen = {0, (after - 1) % m, after % m};
    if (chosen[1] == 0 || chosen[2] == 0 || chosen[1] == chosen[2])
      throw NumericalFailure("orthogonal_input: failed to bracket the antipode");
    const auto p = detail::barycentric_zero(std::polar(1.0, angles[0]),
                                            std::polar(1.0, angles[chosen[1]]),
                                            std::polar(1.0, angles[chosen[2]]));
    if (p.empty()) throw NumericalFailure("orthogonal_input: degenerate triangle");
    weights = p;
    for (auto& x : weights) x = std::max(0.0, x);
    const double s = weights[0] + weights[1] + weights[2];
    for (auto& x : weights) x /= s;
  }

  TensorProductState psi;
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    psi.coefficients.push_back(std::sqrt(weights[k]));
    std::vector<Vector> fs;
    for (auto idx : level[chosen[k]].witness) fs.push_back(spec.eigenvectors.column(idx));
    psi.factors.push_back(std::move(fs));
  }
  return psi;
}

inline RunPlan min_runs(const UnitaryGate& u, const UnitaryGate& v, std::size_t max_n = 12,
                        const Tolerances& tol = default_tolerances()) {
  if (u.dim() != v.dim()) throw InputError("min_runs: gates have different dimensions");
  if (max_n == 0 || max_n > 16) throw InputError("min_runs: max_n must be in [1, 16]");
  const Matrix w = u.matrix().adjoint() * v.matrix();
  const auto spec = linalg::eig_unitary(w, tol);
  const auto arcs = detail::sumset_arcs(spec.eigenvalues, max_n, tol);

  RunPlan plan;
  plan.delta_single = arcs.front().delta;
  if (plan.delta_single > 0.0) plan.ceiling_rule = detail::ceil_ratio(kPi, plan.delta_single);
  for (std::size_t n = 1; n <= max_n; ++n) {
    plan.arc_per_level.push_back(arcs[n - 1].delta);
    // A single eigen-angle means V = e^{i phi} U: never distinguishable.
    if (arcs.front().angles.size() >= 2 && arcs[n - 1].distinguishable_now) {
      plan.n_runs = n;
      break;
    }
  }
  if (plan.n_runs) {
    plan.input_state = orthogonal_input(w, *plan.n_runs, tol);
    plan.certified_overlap = std::abs(power_expectation(w, plan.input_state));
  }
  return plan;
}

/// min_runs on U (+) I_k and V (+) I_k.
inline RunPlan min_runs_embedded(const UnitaryGate& u, const UnitaryGate& v, std::size_t k,
                                 std::size_t max_n = 12,
                                 const Tolerances& tol = default_tolerances()) {
  if (u.dim() != v.dim()) throw InputError("min_runs_embedded: gates have different dimensions");
  if (k == 0) return min_runs(u, v, max_n, tol);
  return min_runs(linalg::direct_sum(u, k), linalg::direct_sum(v, k), max_n, tol);
}

struct ProductArcs {
  double delta_first = 0.0;
  double delta_second = 0.0;
  bool locally_distinguishable = false;  // max(delta_1, delta_2) >= pi
};

/// Product-input criterion for W = U1 (x) U2 run N times.
inline ProductArcs product_local_arcs(const Matrix& u1, const Matrix& u2, std::size_t n,
                                      const Tolerances& tol = default_tolerances()) {
  if (n == 0) throw InputError("product_local_arcs: N must be positive");
  ProductArcs r;
  r.delta_first = sumset_arc(u1, n, tol).delta;
  r.delta_second = sumset_arc(u2, n, tol).delta;
  r.locally_distinguishable = std::max(r.delta_first, r.delta_second) >= kPi - tol.arc_slack;
  return r;
}

struct ControlTrace {
  Complex lhs;
  Complex rhs;
  double x = 0.0;  // Tr(P1^(x)N rho_A^(x)N)
  std::optional<std::size_t> min_n_control;
};

/// Trace of (P1 (x) I + (1 - P1) (x) u)^(x)N against (rho_A (x) rho_B)^(x)N.
/// `lhs` is evaluated on the full N-copy space; `rhs` from the closed form
/// x + (1 - x) sum_i b_i <b_i|rho_B|b_i> applied per copy.
inline ControlTrace control_unitary_trace(const Matrix& p1, const Matrix& u, const Matrix& rho_a,
                                          const Matrix& rho_b, std::size_t n,
                                          std::size_t max_n = 16,
                                          const Tolerances& tol = default_tolerances()) {
  using linalg::tensor;
  using linalg::tensor_power;
  if (n == 0) throw InputError("control_unitary_trace: N must be positive");
  if (!p1.is_square() || linalg::max_abs_diff(p1 * p1, p1) > tol.projector ||
      linalg::hermiticity_defect(p1) > tol.projector)
    throw InputError("control_unitary_trace: P1 is not a projector");
  const linalg::UnitaryGate ug(u, tol);
  const linalg::DensityMatrix da(rho_a, linalg::PartyStructure::single(p1.rows()), tol);
  const linalg::DensityMatrix db(rho_b, linalg::PartyStructure::single(u.rows()), tol);
  const std::size_t copy_dim = p1.rows() * u.rows();
  if (std::pow(static_cast<double>(copy_dim), static_cast<double>(n)) > 256.0)
    throw InputError("control_unitary_trace: N-copy dimension exceeds 256");

  const Matrix ia = Matrix::identity(p1.rows());
  const Matrix w = tensor(p1, Matrix::identity(u.rows())) + tensor(ia - p1, u);
  const Matrix state = tensor(rho_a, rho_b);

  ControlTrace r;
  r.lhs = (tensor_power(w, n) * tensor_power(state, n)).trace();

  const double x1 = (p1 * rho_a).trace().real();
  const auto spec = linalg::eig_unitary(u, tol);
  Complex weighted{};
  for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
    const Vector b = spec.eigenvectors.column(i);
    weighted += spec.eigenvalues[i] * linalg::inner(b, rho_b * b);
  }
  r.rhs = std::pow(x1 + (1.0 - x1) * weighted, static_cast<double>(n));
  r.x = std::pow(x1, static_cast<double>(n));

  const auto arcs = detail::sumset_arcs(spec.eigenvalues, max_n, tol);
  for (std::size_t k = 1; k <= max_n; ++k) {
    auto angles = arcs[k - 1].angles;
    angles.push_back(0.0);
    std::vector<detail::SumPoint> pts;
    for (double a : angles) pts.push_back({a, {}});
    detail::sort_and_merge(pts, tol.angle_merge);
    if (detail::arc_of_sorted(detail::angles_of(pts), tol).distinguishable_now) {
      r.min_n_control = k;
      break;
    }
  }
  return r;
}

}  // namespace udiscrim::spectra
