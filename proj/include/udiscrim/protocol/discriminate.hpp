#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "udiscrim/errors.hpp"
#include "udiscrim/gateclass.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/protocol/local_input.hpp"
#include "udiscrim/protocol/plan.hpp"
#include "udiscrim/spectra.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::protocol {

enum class Strategy { ChoiSingleRun, ParallelN };

inline constexpr std::size_t kPipelineBudget = 20;

/// |phi>_{1,1'} (x) ... (x) |phi>_{n,n'} on a structure whose second half
/// repeats the first (systems, then ancillas).
inline PureState jamiolkowski_input(const linalg::PartyStructure& s) {
  const auto dims = s.local_dims();
  if (dims.size() % 2 != 0) throw InputError("jamiolkowski_input: expected systems followed by ancillas");
  const std::size_t n = dims.size() / 2;
  for (std::size_t p = 0; p < n; ++p)
    if (dims[p] != dims[p + n])
      throw InputError("jamiolkowski_input: ancilla " + std::to_string(p) + " has dimension " +
                       std::to_string(dims[p + n]) + ", system has " + std::to_string(dims[p]));
  std::size_t dsys = 1;
  for (std::size_t p = 0; p < n; ++p) dsys *= dims[p];
  Vector v(s.total_dim());
  const double amp = 1.0 / std::sqrt(static_cast<double>(dsys));
  for (std::size_t i = 0; i < dsys; ++i) v[i * dsys + i] = amp;
  return {v, s};
}

namespace detail {

inline bool phase_equivalent(const Matrix& u, const Matrix& v, const Tolerances& tol) {
  const Matrix w = u.adjoint() * v;
  const Complex t = w.trace() / static_cast<double>(w.rows());
  if (std::abs(t) < 0.5) return false;
  return linalg::max_abs_diff(w, Matrix::identity(w.rows()) * (t / std::abs(t))) <= tol.phase_equivalence;
}

inline void require_bipartite(const linalg::UnitaryGate& g) {
  if (g.structure().parties() != 2)
    throw InputError("LOCC discrimination needs gates on exactly two parties");
}

inline Circuit bare_gate() { return {{CircuitStep::Kind::Oracle, {}}}; }

/// (A1 (x) A2)^dag G (B1 (x) B2)^dag for the canonical locals of a reference gate.
inline Circuit strip_locals(const gateclass::KakDecomposition& k) {
  return {{CircuitStep::Kind::AliceLocal, k.locals_before.first.adjoint()},
          {CircuitStep::Kind::BobLocal, k.locals_before.second.adjoint()},
          {CircuitStep::Kind::Oracle, {}},
          {CircuitStep::Kind::AliceLocal, k.locals_after.first.adjoint()},
          {CircuitStep::Kind::BobLocal, k.locals_after.second.adjoint()}};
}

/// f(G) = c(G) (X (x) I) c(G) (X (x) I): maps the reference gate to
/// exp(2i hx XX) up to phase.
inline Circuit f_circuit(const gateclass::KakDecomposition& k) {
  Circuit out{{CircuitStep::Kind::AliceLocal, linalg::pauli_x()}};
  const auto c = strip_locals(k);
  out.insert(out.end(), c.begin(), c.end());
  out.push_back({CircuitStep::Kind::AliceLocal, linalg::pauli_x()});
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

/// g(G) = A f(G) A^dag f(G), which sends the reference gate to a multiple of I.
inline Circuit g_circuit(const gateclass::KakDecomposition& k, CircuitStep::Kind side,
                         const Matrix& a) {
  const auto f = f_circuit(k);
  Circuit out = f;
  out.push_back({side, a.adjoint()});
  out.insert(out.end(), f.begin(), f.end());
  out.push_back({side, a});
  return out;
}

struct Candidate {
  std::string name;
  Circuit circuit;
};

inline std::optional<std::size_t> global_runs(const Matrix& y) {
  const linalg::UnitaryGate id(Matrix::identity(y.rows()));
  const linalg::UnitaryGate yy(y);
  return spectra::min_runs(id, yy, 12).n_runs;
}

/// Cheapest plan over the candidate circuits within `budget` oracle uses.
inline Plan cheapest_plan(const std::vector<Candidate>& cands, const Matrix& u, const Matrix& v,
                          std::size_t da, std::size_t db, std::size_t budget, std::uint64_t seed,
                          const Tolerances& tol) {
  struct Option {
    std::size_t uses, order;
    const Candidate* cand;
    bool choi;
    std::size_t copies;
    Matrix y;
  };
  std::vector<Option> options;
  for (std::size_t ci = 0; ci < cands.size(); ++ci) {
    const auto& c = cands[ci];
    const std::size_t per = oracle_calls(c.circuit);
    const Matrix tu = circuit_matrix(c.circuit, u, da, db);
    const Matrix tv = circuit_matrix(c.circuit, v, da, db);
    if (phase_equivalent(tu, tv, tol)) continue;
    const Matrix y = tu.adjoint() * tv;
    if (per <= budget && std::abs(y.trace()) <= tol.overlap)
      options.push_back({per, 2 * ci, &c, true, 1, y});
    const auto n0 = global_runs(y);
    if (!n0) continue;
    std::size_t dim = 1;
    for (std::size_t n = 1; n * per <= budget; ++n) {
      dim *= da * db;
      if (dim > kMaxParallelDim) break;
      if (n >= *n0) options.push_back({n * per, 2 * ci + 1, &c, false, n, y});
    }
  }
  std::stable_sort(options.begin(), options.end(), [](const Option& a, const Option& b) {
    return a.uses != b.uses ? a.uses < b.uses : a.order < b.order;
  });
  for (const auto& o : options) {
    Plan p;
    if (o.choi) {
      p = choi_plan(o.cand->circuit, da, db);
    } else {
      auto input = find_local_input(o.y, da, db, o.copies, seed);
      if (!input) continue;
      p = parallel_plan(o.cand->circuit, da, db, o.copies, input->first, input->second);
    }
    p.circuit = o.cand->name;
    try {
      return finalize(std::move(p), u, v, tol);
    } catch (const NumericalFailure&) {
    } catch (const NoBasisFound&) {
    }
  }
  throw StrategyInapplicable("no LOCC plan found within " + std::to_string(budget) +
                             " oracle uses");
}

}  // namespace detail

/// Single-run plan with the Jamiolkowski input; needs Tr(V^dag U) = 0.
inline Plan plan_choi(const linalg::UnitaryGate& u, const linalg::UnitaryGate& v,
                      const Tolerances& tol = default_tolerances()) {
  detail::require_bipartite(u);
  const Complex t = linalg::trace_product(u.matrix(), v.matrix());
  if (!(std::abs(t) <= tol.overlap))
    throw StrategyInapplicable("choi_single_run needs Tr(V^dag U) = 0 (got |Tr| = " +
                               std::to_string(std::abs(t)) + ")");
  const auto& s = u.structure();
  return detail::finalize(choi_plan(detail::bare_gate(), s.dim(0), s.dim(1)), u.matrix(),
                          v.matrix(), tol);
}

/// n parallel uses with a product input, n starting at the global minimum.
inline Plan plan_parallel(const linalg::UnitaryGate& u, const linalg::UnitaryGate& v,
                          std::uint64_t seed, const Tolerances& tol = default_tolerances()) {
  detail::require_bipartite(u);
  const auto runs = spectra::min_runs(u, v, 12, tol);
  if (!runs.n_runs) throw StrategyInapplicable("parallel_n needs a finite global run count");
  const auto& s = u.structure();
  const std::size_t da = s.dim(0), db = s.dim(1);
  const Matrix w = u.matrix().adjoint() * v.matrix();
  std::size_t dim = 1;
  for (std::size_t k = 0; k < *runs.n_runs; ++k) dim *= da * db;
  for (std::size_t n = *runs.n_runs; dim <= kMaxParallelDim; ++n, dim *= da * db) {
    auto input = find_local_input(w, da, db, n, seed);
    if (!input) continue;
    try {
      return detail::finalize(parallel_plan(detail::bare_gate(), da, db, n, input->first, input->second),
                              u.matrix(), v.matrix(), tol);
    } catch (const NumericalFailure&) {
    }
  }
  throw StrategyInapplicable("parallel_n: no product input found within the simulation limit");
}

/// Two-qubit plan within the 20-use budget. Candidate circuits are the bare
/// gate, the axis-collapsing f built from either hypothesis' canonical
/// locals, and the conjugation rounds g(.) = A f(.) A^dag f(.).
inline Plan plan_two_qubit(const linalg::UnitaryGate& u, const linalg::UnitaryGate& v,
                           std::uint64_t seed, const Tolerances& tol = default_tolerances()) {
  const auto dims = u.structure().local_dims();
  if (dims.size() != 2 || dims[0] != 2 || dims[1] != 2 || u.structure() != v.structure())
    throw InputError("two_qubit_pipeline needs two-qubit hypotheses");
  if (detail::phase_equivalent(u.matrix(), v.matrix(), tol))
    throw NotDistinguishableError("hypotheses are equal up to a global phase", 1, 2);

  const auto ku = gateclass::kak_decompose(u, tol);
  const auto kv = gateclass::kak_decompose(v, tol);
  std::vector<detail::Candidate> cands{{"G", detail::bare_gate()},
                                       {"f[0]", detail::f_circuit(ku)},
                                       {"f[1]", detail::f_circuit(kv)}};
  const std::pair<const char*, std::pair<CircuitStep::Kind, Matrix>> conj[] = {
      {"ZI", {CircuitStep::Kind::AliceLocal, linalg::pauli_z()}},
      {"YI", {CircuitStep::Kind::AliceLocal, linalg::pauli_y()}},
      {"IZ", {CircuitStep::Kind::BobLocal, linalg::pauli_z()}},
      {"IY", {CircuitStep::Kind::BobLocal, linalg::pauli_y()}}};
  for (int which = 0; which < 2; ++which)
    for (const auto& [name, a] : conj)
      cands.push_back({"g[" + std::to_string(which) + "," + name + "]",
                       detail::g_circuit(which == 0 ? ku : kv, a.first, a.second)});
  auto p = detail::cheapest_plan(cands, u.matrix(), v.matrix(), 2, 2, kPipelineBudget, seed, tol);
  p.strategy = "pipeline2q/" + p.strategy;
  return p;
}

namespace detail {

inline std::pair<Verdict, Transcript> run_pair(const Plan& p, Oracle& oracle, std::uint64_t seed,
                                               const Tolerances& tol) {
  const std::size_t before = oracle.uses();
  auto [label, log] = execute(p, oracle, seed, tol);
  Verdict v;
  v.guessed_index = p.pair[static_cast<std::size_t>(label)];
  v.oracle_uses = oracle.uses() - before;
  v.success_probability_exact = p.success_probability;
  v.strategy = p.strategy;
  v.circuit = p.circuit;
  v.copies = p.copies;
  v.tests = 1;
  log.verdict(v.guessed_index);
  return {v, log};
}

inline void require_pair(const Oracle& o) {
  if (o.size() != 2) throw InputError("expected exactly two hypotheses");
}

}  // namespace detail

inline std::pair<Verdict, Transcript> locc_discriminate(Oracle& oracle, Strategy strategy,
                                                        std::uint64_t seed,
                                                        const Tolerances& tol = default_tolerances()) {
  detail::require_pair(oracle);
  const auto& h = oracle.hypotheses();
  const Plan p = strategy == Strategy::ChoiSingleRun ? plan_choi(h[0], h[1], tol)
                                                     : plan_parallel(h[0], h[1], seed, tol);
  return detail::run_pair(p, oracle, seed, tol);
}

inline std::pair<Verdict, Transcript> two_qubit_pipeline(Oracle& oracle, std::uint64_t seed,
                                                         const Tolerances& tol = default_tolerances()) {
  detail::require_pair(oracle);
  const auto& h = oracle.hypotheses();
  const Plan p = plan_two_qubit(h[0], h[1], seed, tol);
  return detail::run_pair(p, oracle, seed, tol);
}

/// Plan for one pairwise test: Choi when the trace vanishes, the two-qubit
/// pipeline for qubit pairs, parallel runs otherwise.
inline Plan plan_pair(const linalg::UnitaryGate& u, const linalg::UnitaryGate& v,
                      std::uint64_t seed, const Tolerances& tol = default_tolerances()) {
  detail::require_bipartite(u);
  if (std::abs(linalg::trace_product(u.matrix(), v.matrix())) <= tol.overlap)
    return plan_choi(u, v, tol);
  const auto dims = u.structure().local_dims();
  if (dims[0] == 2 && dims[1] == 2) return plan_two_qubit(u, v, seed, tol);
  return plan_parallel(u, v, seed, tol);
}

/// M-hypothesis identification by M-1 pairwise eliminations.
inline std::pair<Verdict, Transcript> discriminate_many(Oracle& oracle, std::uint64_t seed,
                                                        const Tolerances& tol = default_tolerances()) {
  const auto& h = oracle.hypotheses();
  const std::size_t m = h.size();
  detail::require_bipartite(h[0]);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (detail::phase_equivalent(h[i].matrix(), h[j].matrix(), tol))
        throw NotDistinguishableError("hypotheses " + std::to_string(i + 1) + " and " +
                                          std::to_string(j + 1) + " are equal up to a global phase",
                                      i + 1, j + 1);

  std::map<std::pair<std::size_t, std::size_t>, Plan> plans;
  auto plan_for = [&](std::size_t i, std::size_t j) -> const Plan& {
    auto it = plans.find({i, j});
    if (it == plans.end()) {
      Plan p;
      try {
        p = plan_pair(h[i], h[j], linalg::split_seed(seed, 1000 + i * m + j), tol);
      } catch (const NotDistinguishableError&) {
        throw NotDistinguishableError("hypotheses " + std::to_string(i + 1) + " and " +
                                          std::to_string(j + 1) + " are not distinguishable",
                                      i + 1, j + 1);
      }
      p.pair = {i, j};
      it = plans.emplace(std::pair{i, j}, std::move(p)).first;
    }
    return it->second;
  };

  // Exact success probability: follow every elimination branch for each
  // possible true hypothesis.
  std::function<double(std::vector<std::size_t>, std::size_t)> branch =
      [&](std::vector<std::size_t> rem, std::size_t truth) -> double {
    if (rem.size() == 1) return rem[0] == truth ? 1.0 : 0.0;
    const Plan& p = plan_for(rem[0], rem[1]);
    const Matrix psi = detail::simulate(p, h[truth].matrix()).bipartite();
    const double p0 = verdict_probability(p.measurement, psi, 0);
    double total = 0;
    if (p0 > tol.probability_prune) {
      auto keep = rem;
      keep.erase(keep.begin() + 1);
      total += p0 * branch(keep, truth);
    }
    if (1 - p0 > tol.probability_prune) {
      auto keep = rem;
      keep.erase(keep.begin());
      total += (1 - p0) * branch(keep, truth);
    }
    return total;
  };

  std::vector<std::size_t> remaining(m);
  for (std::size_t i = 0; i < m; ++i) remaining[i] = i;
  double success = 1.0;
  for (std::size_t t = 0; t < m; ++t) success = std::min(success, branch(remaining, t));

  Transcript log;
  Verdict verdict;
  const std::size_t before = oracle.uses();
  std::size_t test = 0;
  while (remaining.size() > 1) {
    const Plan& p = plan_for(remaining[0], remaining[1]);
    auto [label, part] = execute(p, oracle, linalg::split_seed(seed, 2000 + test), tol);
    log.append(part);
    remaining.erase(remaining.begin() + (label == 0 ? 1 : 0));
    ++test;
  }
  verdict.guessed_index = remaining[0];
  verdict.oracle_uses = oracle.uses() - before;
  verdict.success_probability_exact = success;
  verdict.strategy = "eliminate";
  verdict.tests = test;
  log.verdict(verdict.guessed_index);
  return {verdict, log};
}

}  // namespace udiscrim::protocol
