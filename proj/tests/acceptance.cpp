// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Thresholds and runtime budgets are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "test_util.hpp"
#include "udiscrim/cli.hpp"
#include "udiscrim/gateclass.hpp"
#include "udiscrim/io/gatefile.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/protocol.hpp"
#include "udiscrim/spectra.hpp"

using namespace udiscrim;
using namespace udiscrim::linalg;
using testutil::canonical_gate;
using testutil::diag;
using testutil::phase;
using testutil::random_local_pair;

namespace {

struct Check {
  bool ok = true;
  std::string why;
  std::size_t checks = 0;

  void require(bool cond, const std::string& msg) {
    ++checks;
    if (!cond && ok) ok = false, why = msg;
  }
};

UnitaryGate tq(const Matrix& m) { return two_qubit(m); }

double uniform01(std::uint64_t seed) { return static_cast<double>(split_seed(seed, 0) >> 11) * 0x1.0p-53; }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Traceless unitary: either a quarter-turn spectrum or two antipodal pairs.
Matrix traceless(std::uint64_t seed) {
  const Matrix g = haar_random_matrix(4, split_seed(seed, 1));
  const double a = 2 * kPi * uniform01(split_seed(seed, 2));
  const double b = 2 * kPi * uniform01(split_seed(seed, 3));
  const Matrix d = seed % 2 == 0
                       ? diag({phase(a), phase(a + kPi / 2), phase(a + kPi), phase(a + 3 * kPi / 2)})
                       : diag({phase(a), phase(a + kPi), phase(b), phase(b + kPi)});
  return g * d * g.adjoint();
}

// 1. Jamiolkowski input gives orthogonal outputs; one use, always correct.
void choi_orthogonality(Check& c) {
  // |Phi> in (A, B, A', B') order, written out entry by entry.
  Vector phi(16);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) phi[((a * 2 + b) * 2 + a) * 2 + b] = 0.5;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Matrix u = haar_random_matrix(4, seed + 10000);
    const Matrix v = u * traceless(seed);
    const Vector out_u = tensor(u, Matrix::identity(4)) * phi;
    const Vector out_v = tensor(v, Matrix::identity(4)) * phi;
    const double ov = std::abs(inner(out_u, out_v));
    c.require(ov <= 1e-9, "overlap " + num(ov) + " at seed " + std::to_string(seed));
    const std::vector<UnitaryGate> hs{tq(u), tq(v)};
    for (std::size_t hidden = 0; hidden < 2; ++hidden) {
      auto o = protocol::Oracle::with_hidden(hs, hidden);
      auto [verdict, log] = protocol::locc_discriminate(o, protocol::Strategy::ChoiSingleRun, seed);
      protocol::score(verdict, o);
      c.require(*verdict.correct, "wrong verdict at seed " + std::to_string(seed));
      c.require(o.uses() == 1, "used the oracle " + std::to_string(o.uses()) + " times");
    }
  }
}

// 2. N = ceil(pi / delta) on two-level W; brute force for richer spectra.
void run_count_rule(Check& c) {
  std::size_t two_level = 0;
  for (std::uint64_t seed = 0; two_level < 100; ++seed) {
    const double delta = 0.27 + (kPi - 0.27) * uniform01(split_seed(seed, 7));
    const double frac = kPi / delta - std::floor(kPi / delta);
    if (frac < 1e-6 || frac > 1 - 1e-6) continue;
    ++two_level;
    const double a = 2 * kPi * uniform01(split_seed(seed, 8));
    const Matrix g = haar_random_matrix(2, seed + 300);
    const Matrix w = g * diag({phase(a), phase(a + delta)}) * g.adjoint();
    const Matrix u = haar_random_matrix(2, seed + 600);
    const auto plan = spectra::min_runs(UnitaryGate(u), UnitaryGate(u * w));
    const auto expect = static_cast<std::size_t>(std::ceil(kPi / delta));
    c.require(plan.n_runs && *plan.n_runs == expect,
              "delta " + num(delta) + ": got " + (plan.n_runs ? std::to_string(*plan.n_runs) : "none") +
                  ", expected " + std::to_string(expect));
  }
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t d = 3 + seed % 2;
    const Matrix g = haar_random_matrix(d, seed + 900);
    std::vector<Complex> ph;
    for (std::size_t k = 0; k < d; ++k) ph.push_back(phase(0.9 * uniform01(split_seed(seed, 20 + k))));
    const Matrix w = g * Matrix::diagonal(ph) * g.adjoint();
    const auto plan = spectra::min_runs(UnitaryGate(Matrix::identity(d)), UnitaryGate(w));
    const auto brute = oracles::brute_force_runs(w, 12);
    c.require(plan.n_runs == brute, "sumset and brute force disagree at seed " + std::to_string(seed));
  }
}

// 3. -I is indistinguishable from I until one spare level is added.
void three_level_example(Check& c) {
  const UnitaryGate i2(Matrix::identity(2)), m2(Matrix::identity(2) * Complex(-1));
  c.require(!spectra::min_runs(i2, m2).distinguishable(), "I vs -I reported distinguishable");
  const auto e = spectra::min_runs_embedded(i2, m2, 1);
  c.require(e.n_runs && *e.n_runs == 1, "embedded I vs -I did not give N = 1");
  const auto three = spectra::min_runs(UnitaryGate(Matrix::identity(3)), UnitaryGate(diag({-1.0, -1.0, 1.0})));
  c.require(three.n_runs && *three.n_runs == 1, "I3 vs diag(-1,-1,1) did not give N = 1");
}

// 4. Control-unitary trace identity and the product-input criterion.
void control_and_product(Check& c) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 3;
    const Vector a = random_state(2, seed + 1);
    const Matrix p1 = outer(a, a);
    const Matrix u = haar_random_matrix(2, seed + 2);
    Matrix ga = ginibre(2, 2, seed + 3), gb = ginibre(2, 2, seed + 4);
    Matrix ra = ga * ga.adjoint(), rb = gb * gb.adjoint();
    ra *= Complex(1.0 / ra.trace().real());
    rb *= Complex(1.0 / rb.trace().real());
    const auto r = spectra::control_unitary_trace(p1, u, ra, rb, n);
    // Independent evaluation on the dense N-copy space.
    const Matrix cu = tensor(p1, Matrix::identity(2)) + tensor(Matrix::identity(2) - p1, u);
    Matrix big = Matrix::identity(1), rho = Matrix::identity(1);
    for (std::size_t k = 0; k < n; ++k) big = tensor(big, cu), rho = tensor(rho, tensor(ra, rb));
    const Complex dense = (big * rho).trace();
    c.require(std::abs(r.lhs - r.rhs) <= 1e-10, "lhs != rhs at seed " + std::to_string(seed));
    c.require(std::abs(r.lhs - dense) <= 1e-10, "lhs disagrees with dense trace at seed " + std::to_string(seed));
  }
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    double d1, d2;
    if (seed % 3 == 0) {
      d1 = kPi, d2 = kPi * uniform01(split_seed(seed, 1));  // locally distinguishable
    } else {
      d1 = kPi / 2 + (kPi / 2 - 0.05) * uniform01(split_seed(seed, 2));
      d2 = kPi - d1 + (d1 - (kPi - d1)) * uniform01(split_seed(seed, 3));  // d1 + d2 >= pi > max
    }
    const Matrix g1 = haar_random_matrix(2, seed + 50), g2 = haar_random_matrix(2, seed + 90);
    const Matrix u1 = g1 * diag({1.0, phase(d1)}) * g1.adjoint();
    const Matrix u2 = g2 * diag({1.0, phase(d2)}) * g2.adjoint();
    const auto arcs = spectra::product_local_arcs(u1, u2, 1);
    const bool expect = std::max(d1, d2) >= kPi;
    c.require(arcs.locally_distinguishable == expect, "product flag wrong at seed " + std::to_string(seed));
    const auto global = spectra::min_runs(tq(Matrix::identity(4)), tq(tensor(u1, u2)));
    c.require(global.n_runs && *global.n_runs == 1, "global single use failed at seed " + std::to_string(seed));
  }
}

// 5. Canonical decomposition of Haar gates.
void kak_suite(Check& c) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Matrix u = haar_random_matrix(4, seed + 3000);
    const auto k = gateclass::kak_decompose(tq(u));
    const auto& h = k.canonical_vector;
    const Matrix rebuilt = tensor(k.locals_after.first, k.locals_after.second) *
                           canonical_gate(h[0], h[1], h[2]) *
                           tensor(k.locals_before.first, k.locals_before.second) * k.global_phase;
    const double res = max_abs_diff(rebuilt, u);
    c.require(res <= 1e-9, "reconstruction " + num(res) + " at seed " + std::to_string(seed));
    c.require(h[0] <= kPi / 4 + 1e-12 && h[0] >= h[1] - 1e-12 && h[1] >= std::abs(h[2]) - 1e-12,
              "outside the Weyl chamber at seed " + std::to_string(seed));
    const auto [g1, g2] = oracles::makhlin(u);
    const auto [c1, c2] = oracles::makhlin(canonical_gate(h[0], h[1], h[2]));
    c.require(std::abs(g1 - c1) <= 1e-8 && std::abs(g2 - c2) <= 1e-8,
              "local invariants differ at seed " + std::to_string(seed));
    const Matrix dressed = random_local_pair(seed + 5000) * u * random_local_pair(seed + 7000);
    const auto hd = gateclass::canonical_class(tq(dressed));
    for (int i = 0; i < 3; ++i)
      c.require(std::abs(hd[i] - h[i]) <= 1e-8, "dressing changed the class at seed " + std::to_string(seed));
  }
}

// 6. Schmidt classifier vs Lie closure, and multiparty partitions.
void primitivity(Check& c) {
  using gateclass::Label;
  std::vector<Matrix> suite{cnot(), cz(), swap_gate(), Matrix::identity(4)};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    suite.push_back(random_local_pair(seed));
    suite.push_back(random_local_pair(seed + 40) * swap_gate());
    suite.push_back(haar_random_matrix(4, seed + 80));
    suite.push_back(random_local_pair(seed + 120) * cnot() * random_local_pair(seed + 160));
  }
  for (const auto& m : suite) {
    const auto u = tq(m);
    const auto closure = gateclass::lie_closure(u);
    const auto label = gateclass::classify_two_party(u).label;
    const bool imprimitive = closure.matched_partition.size() == 1;
    c.require(imprimitive == (label == Label::Imprimitive), "classifiers disagree");
    c.require(closure.closure_dimension == (imprimitive ? 16u : 7u),
              "closure dimension " + std::to_string(closure.closure_dimension));
  }
  const PartyStructure s{2, 2, 2};
  const Matrix a = haar_random_matrix(2, 1), b = haar_random_matrix(2, 2), cc = haar_random_matrix(2, 3);
  using P = gateclass::Partition;
  auto g = gateclass::multiparty_classify(UnitaryGate(tensor(tensor(a, b), cc), s));
  c.require(g.partition == P{{0}, {1}, {2}}, "A(x)B(x)C partition");
  g = gateclass::multiparty_classify(UnitaryGate(tensor(haar_random_matrix(4, 4), cc), s));
  c.require(g.partition == P{{0, 1}, {2}}, "entangling_12 (x) C partition");
  g = gateclass::multiparty_classify(UnitaryGate(tensor(swap_gate(), Matrix::identity(2)), s));
  c.require(g.partition == P{{0}, {1}, {2}} && g.permutation == std::vector<std::size_t>{1, 0, 2},
            "SWAP_12 (x) I permutation");
  g = gateclass::multiparty_classify(UnitaryGate(haar_random_matrix(8, 5), s));
  c.require(g.label == Label::Imprimitive && g.partition == P{{0, 1, 2}}, "Haar 3-qubit gate");
}

// 7. Two-qubit pipeline across every branch.
void pipeline(Check& c) {
  std::size_t worst = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Matrix u, v;
    const std::uint64_t s = seed * 13 + 1;
    switch (seed % 5) {
      case 0:  // both primitive
        u = random_local_pair(s);
        v = seed % 2 ? random_local_pair(s + 1) * swap_gate() : random_local_pair(s + 1);
        break;
      case 1:  // one primitive
        u = random_local_pair(s);
        v = haar_random_matrix(4, s + 2);
        break;
      case 2: {  // both imprimitive, same canonical class
        const Matrix k = canonical_gate(0.1 + 0.6 * uniform01(s), 0.05, 0.02);
        u = random_local_pair(s + 3) * k * random_local_pair(s + 4);
        v = seed % 2 ? random_local_pair(s + 5) * k * random_local_pair(s + 6) : u * random_local_pair(s + 7);
        break;
      }
      case 3:  // both imprimitive, different classes
        u = haar_random_matrix(4, s + 8);
        v = haar_random_matrix(4, s + 9);
        break;
      default: {  // phase-equivalent
        u = haar_random_matrix(4, s + 10);
        v = u * phase(0.3 + uniform01(s));
        auto o = protocol::Oracle::with_hidden({tq(u), tq(v)}, 0);
        bool refused = false;
        try {
          protocol::two_qubit_pipeline(o, seed);
        } catch (const NotDistinguishableError&) {
          refused = true;
        }
        c.require(refused, "phase pair not refused at seed " + std::to_string(seed));
        continue;
      }
    }
    const std::vector<UnitaryGate> hs{tq(u), tq(v)};
    for (std::size_t hidden = 0; hidden < 2; ++hidden) {
      auto o = protocol::Oracle::with_hidden(hs, hidden);
      auto [verdict, log] = protocol::two_qubit_pipeline(o, seed);
      protocol::score(verdict, o);
      worst = std::max(worst, o.uses());
      c.require(*verdict.correct, "wrong verdict at seed " + std::to_string(seed));
      c.require(o.uses() <= 20, std::to_string(o.uses()) + " uses at seed " + std::to_string(seed));
      c.require(protocol::audit_locality(log), "locality audit failed at seed " + std::to_string(seed));
    }
  }
  if (c.ok) c.why = "max uses " + std::to_string(worst);
}

// 8. Two-step LOCC measurement on random orthogonal pairs.
void walgate_suite(Check& c) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const PureState psi0(random_state(16, seed + 40000), PartyStructure{4, 4});
    const PureState psi1 = oracles::orthogonal_partner(psi0, seed + 50000);
    const auto r = protocol::walgate_measurement(psi0, psi1, {0});
    const auto& w = r.measurement;
    c.require(r.certified_cost <= 1e-10, "cost " + num(r.certified_cost));
    for (std::size_t k = 0; k < 4; ++k) {
      const Vector a = w.alice_vectors.column(k);
      Vector eta(4), nu(4);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          eta[j] += std::conj(a[i]) * psi0.vector()[i * 4 + j];
          nu[j] += std::conj(a[i]) * psi1.vector()[i * 4 + j];
        }
      c.require(std::abs(inner(eta, nu)) <= 1e-9, "Bob conditionals not orthogonal");
    }
    const double p0 = oracles::dense_verdict_probability(w, psi0.vector(), 4, 0);
    const double p1 = oracles::dense_verdict_probability(w, psi1.vector(), 4, 1);
    c.require(std::abs(p0 - 1) <= 1e-6 && std::abs(p1 - 1) <= 1e-6, "success below 1 at seed " + std::to_string(seed));
  }
}

// 9. M = 3 identified with exactly M - 1 tests.
void elimination(Check& c) {
  std::vector<std::vector<Matrix>> suites{
      {Matrix::identity(4), tensor(pauli_x(), pauli_x()), tensor(pauli_z(), pauli_z())},
      {cnot(), cz(), swap_gate()},
      {haar_random_matrix(4, 1), haar_random_matrix(4, 2), haar_random_matrix(4, 3)},
  };
  for (const auto& s : suites) {
    std::vector<UnitaryGate> hs;
    for (const auto& m : s) hs.push_back(tq(m));
    for (std::size_t hidden = 0; hidden < 3; ++hidden)
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto o = protocol::Oracle::with_hidden(hs, hidden);
        auto [verdict, log] = protocol::discriminate_many(o, seed);
        protocol::score(verdict, o);
        c.require(*verdict.correct, "wrong verdict");
        c.require(verdict.tests == 2, std::to_string(verdict.tests) + " tests");
        c.require(protocol::audit_locality(log), "locality audit failed");
      }
  }
}

// 10. Determinism, file round trips, and solver residuals.
void infrastructure(Check& c) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("udiscrim_acc_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<Matrix> gates{Matrix::identity(4), tensor(pauli_x(), pauli_x()), tensor(pauli_z(), pauli_z()),
                                  haar_random_matrix(4, 77)};
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    paths.push_back((dir / ("g" + std::to_string(i) + ".json")).string());
    std::ofstream(paths.back()) << io::serialize_gate(tq(gates[i]));
  }
  auto run = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "udiscrim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::pair{code, out.str()};
  };
  auto slurp = [](const std::string& p) { return io::read_file(p); };
  const std::string log1 = (dir / "a.log").string(), log2 = (dir / "b.log").string();
  const auto r1 = run({"simulate", paths[0], paths[1], paths[2], "--seed", "5", "--trials", "8", "--log", log1});
  const auto r2 = run({"simulate", paths[0], paths[1], paths[2], "--seed", "5", "--trials", "8", "--log", log2});
  c.require(r1.first == 0 && r2.first == 0, "simulate failed");
  // Reports differ only in the echoed log path.
  auto strip = [&](std::string s, const std::string& p) { return s.replace(s.find(p), p.size(), "LOG"); };
  c.require(strip(r1.second, log1) == strip(r2.second, log2), "simulate reports differ");
  c.require(slurp(log1) == slurp(log2), "transcripts differ");
  const auto p1 = run({"simulate", paths[0], paths[3], "--strategy", "pipeline2q", "--seed", "9", "--trials", "3"});
  const auto p2 = run({"simulate", paths[0], paths[3], "--strategy", "pipeline2q", "--seed", "9", "--trials", "3"});
  c.require(p1.first == 0 && p1.second == p2.second, "pipeline reports differ");
  const auto k1 = run({"kak", paths[3]}), k2 = run({"kak", paths[3]});
  c.require(k1.second == k2.second, "kak reports differ");
  const auto rep = nlohmann::ordered_json::parse(k1.second);
  c.require(rep.dump(2) + "\n" == k1.second, "report does not round-trip");
  fs::remove_all(dir);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const UnitaryGate g(haar_random_matrix(6, seed), PartyStructure{3, 2});
    const UnitaryGate back = io::parse_gate(io::serialize_gate(g));
    bool same = back.structure() == g.structure();
    for (std::size_t i = 0; i < g.matrix().entries().size(); ++i)
      same = same && back.matrix().entries()[i] == g.matrix().entries()[i];
    c.require(same, "gate file round trip not exact");
  }

  auto eig_residual = [](const Matrix& m, const Spectrum& s) {
    double r = 0;
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
      const Vector v = s.eigenvectors.column(k);
      Vector mv = m * v;
      for (std::size_t i = 0; i < v.size(); ++i) mv[i] -= s.eigenvalues[k] * v[i];
      r = std::max(r, norm(mv));
    }
    return std::max(r, unitarity_defect(s.eigenvectors));
  };
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Matrix u3 = haar_random_matrix(3, seed);
    const Matrix g = haar_random_matrix(4, seed + 1);
    for (const Matrix& m : {haar_random_matrix(8, seed + 2), tensor(u3, u3),
                            Matrix(g * diag({phase(0.4), phase(0.4), phase(-0.4), phase(2.0)}) * g.adjoint()),
                            Matrix::identity(5), Matrix(tensor(pauli_z(), pauli_z()))}) {
      const double r = eig_residual(m, eig_unitary(m));
      c.require(r <= 1e-9, "unitary eigen residual " + num(r));
    }
    Matrix h = ginibre(6, 6, seed + 3);
    h = h + h.adjoint();
    const Matrix p = outer(random_state(5, seed), random_state(5, seed));  // rank one: fourfold zero
    for (const Matrix& m : {h, p}) {
      const auto s = eig_hermitian(m);
      Spectrum as_complex{{}, s.eigenvectors};
      for (double l : s.eigenvalues) as_complex.eigenvalues.emplace_back(l);
      const double r = eig_residual(m, as_complex);
      c.require(r <= 1e-9, "hermitian eigen residual " + num(r));
    }
    for (const Matrix& m : {ginibre(4, 6, seed + 4), ginibre(6, 3, seed + 5), p, Matrix::identity(3)}) {
      const auto s = svd(m);
      Matrix rebuilt(m.rows(), m.cols());
      for (std::size_t k = 0; k < s.values.size(); ++k)
        rebuilt += outer(s.left.column(k), s.right.column(k)) * Complex(s.values[k]);
      c.require(max_abs_diff(rebuilt, m) <= 1e-9, "svd reconstruction");
    }
  }
}

struct Criterion {
  const char* name;
  double budget_seconds;  // 0: no explicit limit
  std::function<void(Check&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"choi orthogonality", 30, choi_orthogonality},
      {"run-count rule", 10, run_count_rule},
      {"three-level example", 0, three_level_example},
      {"control-unitary identity and product criterion", 0, control_and_product},
      {"canonical decomposition", 0, kak_suite},
      {"primitivity", 0, primitivity},
      {"two-qubit pipeline", 120, pipeline},
      {"two-step LOCC measurement", 0, walgate_suite},
      {"M-hypothesis elimination", 0, elimination},
      {"infrastructure", 0, infrastructure},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& cr = criteria[i];
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.why = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_seconds > 0 && secs > cr.budget_seconds && c.ok) {
      c.ok = false;
      c.why = "runtime " + num(secs) + " s over budget " + num(cr.budget_seconds) + " s";
    }
    failures += !c.ok;
    std::printf("CRITERION %2zu %s  %s  [%zu checks, %.2f s]%s%s\n", i + 1, c.ok ? "PASS" : "FAIL", cr.name, c.checks,
                secs, c.why.empty() ? "" : "  ", c.why.c_str());
  }
  std::printf("%s: %d of %zu criteria failed\n", failures ? "FAILED" : "OK", failures, criteria.size());
  return failures ? 1 : 0;
}
