#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <set>

#include "test_util.hpp"
#include "udiscrim/protocol.hpp"

using namespace udiscrim;
using namespace udiscrim::linalg;
using namespace udiscrim::protocol;
using testutil::random_local_pair;

namespace {

UnitaryGate tq(const Matrix& m) { return two_qubit(m); }

Matrix traceless_unitary(std::uint64_t seed) {
  // Conjugated diag(1, i, -1, -i) has zero trace.
  const Matrix g = haar_random_matrix(4, seed);
  return g * testutil::diag({1.0, Complex(0, 1), -1.0, Complex(0, -1)}) * g.adjoint();
}

}  // namespace

TEST(RegisterState, ApplyMatchesDenseKron) {
  const std::vector<Register> regs{{"a", 2, Party::Alice}, {"b", 3, Party::Bob}, {"c", 2, Party::Alice}};
  const Vector alice = random_state(4, 1), bob = random_state(3, 2);
  RegisterState s(regs, alice, bob);
  // Amplitude order is (a, b, c); Alice's vector is over (a, c).
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 2; ++c)
        EXPECT_EQ(s.amplitudes()[(a * 3 + b) * 2 + c], alice[a * 2 + c] * bob[b]);
  const Matrix op = haar_random_matrix(4, 3);
  const Vector before = s.amplitudes();
  s.apply(op, std::vector<std::size_t>{2, 0});
  // Dense oracle: op on (c, a) = P^dag (op (x) I_b) P with P reordering (a,b,c) -> (c,a,b).
  const std::vector<std::size_t> dims{2, 3, 2}, order{2, 0, 1};
  const Matrix p = party_permutation(dims, order);
  const Vector expect = p.adjoint() * (tensor(op, Matrix::identity(3)) * (p * before));
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(std::abs(s.amplitudes()[i] - expect[i]), 0, 1e-14);
  EXPECT_THROW(s.apply(op, std::vector<std::size_t>{0, 0}), InputError);
}

TEST(Jamiolkowski, Examples) {
  const auto phi = jamiolkowski_input(PartyStructure{2, 2, 2, 2});
  // (|00> + |11>)_{AA'} (x) (|00> + |11>)_{BB'} / 2 in (A, B, A', B') order.
  for (std::size_t i = 0; i < 16; ++i) {
    const auto d = digits_of(i, std::vector<std::size_t>{2, 2, 2, 2});
    const double expect = (d[0] == d[2] && d[1] == d[3]) ? 0.5 : 0.0;
    EXPECT_NEAR(std::abs(phi.vector()[i] - Complex(expect)), 0, 1e-15);
  }
  const auto rho = DensityMatrix::from_pure(phi);
  const auto ma = partial_trace(rho, std::vector<std::size_t>{0});
  EXPECT_LE(max_abs_diff(ma.matrix(), Matrix::identity(2) * Complex(0.5)), 1e-10);
  const Matrix xi = tensor(tensor(pauli_x(), Matrix::identity(2)), Matrix::identity(4));
  EXPECT_NEAR(std::abs(inner(phi.vector(), xi * phi.vector())), 0.0, 1e-15);
  EXPECT_THROW(jamiolkowski_input(PartyStructure{2, 3, 2, 2}), InputError);
  EXPECT_THROW(jamiolkowski_input(PartyStructure{2, 2, 2}), InputError);
}

TEST(Jamiolkowski, OverlapEqualsNormalizedTrace) {
  const auto phi = jamiolkowski_input(PartyStructure{2, 2, 2, 2});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Matrix u = haar_random_matrix(4, seed), v = haar_random_matrix(4, seed + 500);
    const Matrix big = tensor(v.adjoint() * u, Matrix::identity(4));
    const Complex lhs = inner(phi.vector(), big * phi.vector());
    EXPECT_LE(std::abs(lhs - trace_product(u, v) / 4.0), 1e-10);
  }
}

TEST(Oracle, AccountingAndHiding) {
  std::vector<UnitaryGate> hs{tq(Matrix::identity(4)), tq(cnot())};
  Oracle o(hs, 5);
  EXPECT_EQ(o.uses(), 0u);
  RegisterState s({{"A", 2, Party::Alice}, {"B", 2, Party::Bob}}, Vector{1, 0}, Vector{1, 0});
  Transcript t;
  o.invoke(s, std::vector<std::size_t>{0, 1}, false, t);
  o.invoke(s, std::vector<std::size_t>{0, 1}, true, t);
  EXPECT_EQ(o.uses(), 2u);
  EXPECT_EQ(t.to_text(), "USE fwd\nUSE inv\n");
  Oracle no_inv(hs, 5, false);
  EXPECT_THROW(no_inv.invoke(s, std::vector<std::size_t>{0, 1}, true, t), InputError);
  EXPECT_THROW(Oracle({hs[0]}, 1), InputError);
  EXPECT_THROW(Oracle({hs[0], UnitaryGate(Matrix::identity(4))}, 1), InputError);
  // Hidden choices cover both hypotheses across seeds.
  std::set<std::size_t> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed) seen.insert(Oracle(hs, seed).reveal_for_scoring());
  EXPECT_EQ(seen.size(), 2u);
}

TEST(LoccDiscriminate, ChoiExamples) {
  std::vector<UnitaryGate> hs{tq(Matrix::identity(4)), tq(tensor(pauli_x(), pauli_x()))};
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    for (std::size_t hidden = 0; hidden < 2; ++hidden) {
      auto o = Oracle::with_hidden(hs, hidden);
      auto [v, t] = locc_discriminate(o, Strategy::ChoiSingleRun, seed);
      score(v, o);
      EXPECT_TRUE(*v.correct);
      EXPECT_EQ(v.oracle_uses, 1u);
      EXPECT_EQ(o.uses(), 1u);
      EXPECT_NEAR(v.success_probability_exact, 1.0, 1e-9);
      EXPECT_TRUE(audit_locality(t));
    }
}

TEST(LoccDiscriminate, ChoiInapplicableThenParallel) {
  std::vector<UnitaryGate> hs{tq(Matrix::identity(4)), tq(cz())};
  auto o = Oracle::with_hidden(hs, 1);
  EXPECT_THROW(locc_discriminate(o, Strategy::ChoiSingleRun, 1), StrategyInapplicable);
  EXPECT_EQ(o.uses(), 0u);
  // W = CZ has eigen-angles {0, pi}: a single use already suffices.
  const auto runs = spectra::min_runs(hs[0], hs[1]);
  ASSERT_TRUE(runs.n_runs);
  EXPECT_EQ(*runs.n_runs, 1u);
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    for (std::size_t hidden = 0; hidden < 2; ++hidden) {
      auto oo = Oracle::with_hidden(hs, hidden);
      auto [v, t] = locc_discriminate(oo, Strategy::ParallelN, seed);
      score(v, oo);
      EXPECT_TRUE(*v.correct);
      EXPECT_EQ(v.copies, 1u);
      EXPECT_NEAR(v.success_probability_exact, 1.0, 1e-9);
      EXPECT_TRUE(audit_locality(t));
    }
}

TEST(LoccDiscriminate, ParallelNeedsSeveralCopies) {
  // W = diag(1, e^{i pi/2}) (x) I: arc pi/2, two copies needed.
  std::vector<UnitaryGate> hs{tq(Matrix::identity(4)),
                              tq(tensor(testutil::diag({1.0, Complex(0, 1)}), Matrix::identity(2)))};
  for (std::size_t hidden = 0; hidden < 2; ++hidden) {
    auto o = Oracle::with_hidden(hs, hidden);
    auto [v, t] = locc_discriminate(o, Strategy::ParallelN, 3);
    score(v, o);
    EXPECT_TRUE(*v.correct);
    EXPECT_EQ(v.copies, 2u);
    EXPECT_EQ(o.uses(), 2u);
  }
}

TEST(LoccDiscriminate, RandomChoiPairs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix u = haar_random_matrix(4, seed);
    std::vector<UnitaryGate> hs{tq(u), tq(u * traceless_unitary(seed + 100))};
    for (std::size_t hidden = 0; hidden < 2; ++hidden) {
      auto o = Oracle::with_hidden(hs, hidden);
      auto [v, t] = locc_discriminate(o, Strategy::ChoiSingleRun, seed);
      score(v, o);
      EXPECT_TRUE(*v.correct);
      EXPECT_NEAR(v.success_probability_exact, 1.0, 1e-9);
    }
  }
}

TEST(Transcript, DeterministicPerSeed) {
  std::vector<UnitaryGate> hs{tq(haar_random_matrix(4, 1)), tq(haar_random_matrix(4, 2))};
  auto o1 = Oracle(hs, 42), o2 = Oracle(hs, 42);
  const auto a = two_qubit_pipeline(o1, 42).second.to_text();
  const auto b = two_qubit_pipeline(o2, 42).second.to_text();
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("VERDICT"), std::string::npos);
}

TEST(Sampling, FrequencyMatchesExactProbability) {
  // Per-seed verdicts agree with the exact success probability (which is 1).
  std::vector<UnitaryGate> hs{tq(Matrix::identity(4)), tq(cz())};
  int correct = 0;
  double p = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto o = Oracle(hs, seed);
    auto [v, t] = locc_discriminate(o, Strategy::ParallelN, seed);
    score(v, o);
    correct += *v.correct;
    p = v.success_probability_exact;
  }
  const double sigma = std::sqrt(200 * p * (1 - p));
  EXPECT_LE(std::abs(correct - 200 * p), 3 * sigma + 1e-6);
}

TEST(Pipeline, Examples) {
  const Matrix cn = cnot();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix dressed = random_local_pair(seed) * cn * random_local_pair(seed + 77);
    std::vector<UnitaryGate> hs{tq(cn), tq(dressed)};
    for (std::size_t hidden = 0; hidden < 2; ++hidden) {
      auto o = Oracle::with_hidden(hs, hidden);
      auto [v, t] = two_qubit_pipeline(o, seed);
      score(v, o);
      EXPECT_TRUE(*v.correct) << seed;
      EXPECT_LE(o.uses(), 20u);
      EXPECT_NEAR(v.success_probability_exact, 1.0, 1e-9);
      EXPECT_TRUE(audit_locality(t));
    }
  }

  std::vector<UnitaryGate> xx{tq(testutil::canonical_gate(0.3, 0, 0)), tq(testutil::canonical_gate(0.7, 0, 0))};
  for (std::size_t hidden = 0; hidden < 2; ++hidden) {
    auto o = Oracle::with_hidden(xx, hidden);
    auto [v, t] = two_qubit_pipeline(o, 9);
    score(v, o);
    EXPECT_TRUE(*v.correct);
    EXPECT_LE(o.uses(), 20u);
    // W = exp(0.4i XX) has arc 0.8, so four uses are needed even globally.
    EXPECT_GE(o.uses(), 4u);
  }

  const Matrix u = haar_random_matrix(4, 3);
  auto o = Oracle::with_hidden({tq(u), tq(u * Complex(std::polar(1.0, 0.4)))}, 0);
  EXPECT_THROW(two_qubit_pipeline(o, 1), NotDistinguishableError);
}

TEST(DiscriminateMany, PauliSuite) {
  const std::vector<UnitaryGate> hs{tq(Matrix::identity(4)), tq(tensor(pauli_x(), pauli_x())),
                                    tq(tensor(pauli_z(), pauli_z()))};
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (std::size_t hidden = 0; hidden < 3; ++hidden) {
      auto o = Oracle::with_hidden(hs, hidden);
      auto [v, t] = discriminate_many(o, seed);
      score(v, o);
      EXPECT_TRUE(*v.correct);
      EXPECT_EQ(v.tests, 2u);
      EXPECT_EQ(v.oracle_uses, o.uses());
      EXPECT_NEAR(v.success_probability_exact, 1.0, 1e-9);
      EXPECT_TRUE(audit_locality(t));
    }
}

TEST(DiscriminateMany, TwoHypothesesAndPhasePair) {
  const std::vector<UnitaryGate> two{tq(Matrix::identity(4)), tq(cz())};
  auto o = Oracle::with_hidden(two, 1);
  auto [v, t] = discriminate_many(o, 4);
  EXPECT_EQ(v.tests, 1u);
  EXPECT_EQ(v.guessed_index, 1u);

  const Matrix u = haar_random_matrix(4, 8);
  auto o3 = Oracle::with_hidden({tq(u), tq(u * Complex(0, 1)), tq(cnot())}, 2);
  try {
    discriminate_many(o3, 1);
    FAIL() << "expected NotDistinguishableError";
  } catch (const NotDistinguishableError& e) {
    EXPECT_EQ(e.first(), 1u);
    EXPECT_EQ(e.second(), 2u);
  }
}
