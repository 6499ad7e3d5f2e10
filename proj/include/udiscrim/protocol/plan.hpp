#pragma once

// Discrimination plans: registers, a product input, a sequence of local gates
// and oracle calls, and the final two-step LOCC measurement.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "udiscrim/errors.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/protocol/numrange.hpp"
#include "udiscrim/protocol/oracle.hpp"
#include "udiscrim/protocol/state.hpp"
#include "udiscrim/protocol/walgate.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::protocol {

struct Verdict {
  std::size_t guessed_index = 0;
  std::optional<bool> correct;  // set by score()
  std::size_t oracle_uses = 0;
  double success_probability_exact = 0.0;
  std::string strategy;
  std::string circuit;
  std::size_t copies = 0;
  std::size_t tests = 0;
};

inline void score(Verdict& v, const Oracle& o) { v.correct = v.guessed_index == o.reveal_for_scoring(); }

/// One element of a circuit acting on a (system A, system B) register pair.
struct CircuitStep {
  enum class Kind { AliceLocal, BobLocal, Oracle } kind;
  Matrix op;  // unused for Oracle
};
using Circuit = std::vector<CircuitStep>;

inline std::size_t oracle_calls(const Circuit& c) {
  std::size_t n = 0;
  for (const auto& s : c) n += s.kind == CircuitStep::Kind::Oracle;
  return n;
}

/// The operator a circuit implements when the oracle holds `gate`.
inline Matrix circuit_matrix(const Circuit& c, const Matrix& gate, std::size_t da, std::size_t db) {
  Matrix m = Matrix::identity(da * db);
  for (const auto& s : c) {
    switch (s.kind) {
      case CircuitStep::Kind::AliceLocal: m = linalg::tensor(s.op, Matrix::identity(db)) * m; break;
      case CircuitStep::Kind::BobLocal: m = linalg::tensor(Matrix::identity(da), s.op) * m; break;
      case CircuitStep::Kind::Oracle: m = gate * m; break;
    }
  }
  return m;
}

struct Step {
  bool oracle = false;
  Party party = Party::Alice;  // for local steps
  Matrix op;
  std::vector<std::size_t> targets;
};

struct Plan {
  std::string strategy;
  std::string circuit = "G";
  std::size_t copies = 1;
  std::array<std::size_t, 2> pair{0, 1};
  std::vector<Register> registers;
  Vector alice_input, bob_input;
  std::vector<Step> steps;
  std::size_t oracle_uses = 0;
  WalgateMeasurement measurement;
  double success_probability = 0.0;
};

namespace detail {

inline RegisterState simulate(const Plan& p, const Matrix& gate) {
  RegisterState s(p.registers, p.alice_input, p.bob_input);
  for (const auto& st : p.steps) s.apply(st.oracle ? gate : st.op, st.targets);
  return s;
}

/// Computes the final states for both hypotheses, checks orthogonality and
/// attaches the LOCC measurement.
inline Plan finalize(Plan p, const Matrix& u, const Matrix& v, const Tolerances& tol) {
  const Matrix psi0 = simulate(p, u).bipartite();
  const Matrix psi1 = simulate(p, v).bipartite();
  const double overlap = std::abs(linalg::trace_product(psi1, psi0));
  if (!(overlap <= tol.overlap))
    throw NumericalFailure("plan outputs are not orthogonal (overlap " + std::to_string(overlap) + ")");
  p.measurement = walgate_from_coefficients(psi0, psi1, tol);
  p.success_probability = std::min(verdict_probability(p.measurement, psi0, 0),
                                   verdict_probability(p.measurement, psi1, 1));
  return p;
}

inline Vector max_entangled(std::size_t d) {
  Vector v(d * d);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

/// Adds `copies` replicas of the circuit, replica c acting on registers
/// (a_regs[c], b_regs[c]).
inline void add_circuit(Plan& p, const Circuit& c, const std::vector<std::size_t>& a_regs,
                        const std::vector<std::size_t>& b_regs) {
  for (std::size_t k = 0; k < a_regs.size(); ++k)
    for (const auto& s : c) {
      Step st;
      switch (s.kind) {
        case CircuitStep::Kind::AliceLocal:
          st.party = Party::Alice, st.op = s.op, st.targets = {a_regs[k]};
          break;
        case CircuitStep::Kind::BobLocal:
          st.party = Party::Bob, st.op = s.op, st.targets = {b_regs[k]};
          break;
        case CircuitStep::Kind::Oracle:
          st.oracle = true, st.targets = {a_regs[k], b_regs[k]};
          ++p.oracle_uses;
          break;
      }
      p.steps.push_back(std::move(st));
    }
}

inline double uniform01(std::uint64_t seed, std::uint64_t stream) {
  return static_cast<double>(linalg::split_seed(seed, stream) >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Jamiolkowski input: |phi>_{AA'} (x) |phi>_{BB'}, registers ordered A, B, A', B'.
inline Plan choi_plan(const Circuit& c, std::size_t da, std::size_t db) {
  Plan p;
  p.strategy = "choi";
  p.registers = {{"A", da, Party::Alice}, {"B", db, Party::Bob},
                 {"A'", da, Party::Alice}, {"B'", db, Party::Bob}};
  p.alice_input = detail::max_entangled(da);
  p.bob_input = detail::max_entangled(db);
  detail::add_circuit(p, c, {0}, {1});
  return p;
}

/// n replicas with product input a (x) b on registers A1..An, B1..Bn.
inline Plan parallel_plan(const Circuit& c, std::size_t da, std::size_t db, std::size_t n,
                          Vector a, Vector b) {
  Plan p;
  p.strategy = "parallel";
  p.copies = n;
  std::vector<std::size_t> ar, br;
  for (std::size_t k = 0; k < n; ++k) {
    ar.push_back(p.registers.size());
    p.registers.push_back({"A" + std::to_string(k + 1), da, Party::Alice});
  }
  for (std::size_t k = 0; k < n; ++k) {
    br.push_back(p.registers.size());
    p.registers.push_back({"B" + std::to_string(k + 1), db, Party::Bob});
  }
  p.alice_input = std::move(a);
  p.bob_input = std::move(b);
  detail::add_circuit(p, c, ar, br);
  return p;
}

/// Runs a finalized plan against the oracle; returns the pair-local label
/// (0 or 1) and the transcript.
inline std::pair<int, Transcript> execute(const Plan& p, Oracle& oracle, std::uint64_t seed,
                                          const Tolerances& tol = default_tolerances()) {
  Transcript log;
  RegisterState s(p.registers, p.alice_input, p.bob_input);
  for (const auto& st : p.steps) {
    if (st.oracle) {
      oracle.invoke(s, st.targets, false, log);
    } else {
      s.apply(st.op, st.targets);
      log.record({Transcript::Operation::Type::Local, st.party, st.targets,
                  std::vector<Party>(st.targets.size(), st.party), std::nullopt});
    }
  }
  const Matrix psi = s.bipartite();
  const auto& w = p.measurement;
  const auto alice_regs = s.party_registers(Party::Alice);
  const auto bob_regs = s.party_registers(Party::Bob);

  // Alice's outcome.
  std::vector<double> probs;
  std::vector<Vector> conds;
  double total = 0;
  for (std::size_t k = 0; k < w.bob_vectors.size(); ++k) {
    Vector a = w.alice_vectors.column(k);
    for (auto& z : a) z = std::conj(z);
    conds.push_back(psi.transpose() * a);
    const double pk = std::pow(linalg::norm(conds.back()), 2);
    probs.push_back(pk < tol.probability_prune ? 0.0 : pk);
    total += probs.back();
  }
  if (!(total > 0)) throw NumericalFailure("all measurement outcomes were pruned");
  double r = detail::uniform01(seed, 1) * total;
  std::size_t k = 0;
  for (; k + 1 < probs.size(); ++k) {
    if (probs[k] > 0 && r < probs[k]) break;
    r -= probs[k];
  }
  while (probs[k] == 0) --k;
  log.record({Transcript::Operation::Type::Measure, Party::Alice, alice_regs,
              std::vector<Party>(alice_regs.size(), Party::Alice), std::nullopt});
  const std::size_t msg = log.message(Party::Alice, k);

  // Bob's two-outcome projection, chosen by Alice's message.
  Vector cond = conds[k];
  const double nc = linalg::norm(cond);
  for (auto& z : cond) z /= nc;
  double p_click = std::norm(linalg::inner(w.bob_vectors[k], cond));
  if (p_click < tol.probability_prune) p_click = 0;
  if (1 - p_click < tol.probability_prune) p_click = 1;
  const bool click = detail::uniform01(seed, 2) < p_click;
  log.record({Transcript::Operation::Type::Measure, Party::Bob, bob_regs,
              std::vector<Party>(bob_regs.size(), Party::Bob), msg});
  log.message(Party::Bob, click ? 0 : 1);
  const int label = click ? w.bob_click_label[k] : 1 - w.bob_click_label[k];
  return {label, log};
}

}  // namespace udiscrim::protocol
