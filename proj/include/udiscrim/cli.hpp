#pragma once

// Command-line front end. Every command prints one JSON report to `out`;
// diagnostics go to `err`. Exit codes: 0 ok, 2 input error, 3 strategy
// inapplicable, 4 numerical failure.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "udiscrim/errors.hpp"
#include "udiscrim/gateclass.hpp"
#include "udiscrim/io/gatefile.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/protocol.hpp"
#include "udiscrim/spectra.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::cli {

using io::ordered_json;

enum ExitCode : int { kOk = 0, kInputError = 2, kInapplicable = 3, kNumerical = 4 };

namespace detail {

struct Context {
  std::vector<std::string> argv;
  std::vector<std::string> tol_overrides;
  Tolerances tol;
  ordered_json inputs = ordered_json::array();
};

inline void apply_tolerances(Context& ctx) {
  for (const auto& kv : ctx.tol_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("--tol expects name=value, got '" + kv + "'");
    const std::string name = kv.substr(0, eq);
    double value = 0;
    try {
      std::size_t used = 0;
      value = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError("--tol value for '" + name + "' is not a number");
    }
    if (!(value >= 0)) throw InputError("--tol value for '" + name + "' must be nonnegative");
    if (!ctx.tol.set(name, value)) throw InputError("unknown tolerance '" + name + "'");
  }
}

inline linalg::UnitaryGate load(Context& ctx, const std::string& path) {
  const std::string bytes = io::read_file(path);
  ctx.inputs.push_back({{"path", path}, {"digest", io::digest(bytes)}});
  try {
    return io::parse_gate(bytes, ctx.tol);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline ordered_json report(const Context& ctx, const std::string& command, ordered_json result) {
  ordered_json r;
  r["command"] = command;
  r["argv"] = ctx.argv;
  r["inputs"] = ctx.inputs;
  r["result"] = std::move(result);
  ordered_json t = ordered_json::object();
  for_each_tolerance(ctx.tol, [&](const char* name, double v) { t[name] = v; });
  r["tolerances"] = std::move(t);
  return r;
}

inline ordered_json partition_json(const gateclass::Partition& p) {
  ordered_json out = ordered_json::array();
  for (const auto& block : p) out.push_back(block);
  return out;
}

inline ordered_json class_json(const gateclass::GateClass& c) {
  ordered_json r;
  r["label"] = gateclass::to_string(c.label);
  r["partition"] = partition_json(c.partition);
  r["permutation"] = c.permutation;
  if (c.local_factors) {
    ordered_json f = ordered_json::array();
    for (const auto& m : *c.local_factors) f.push_back(io::matrix_json(m));
    r["local_factors"] = std::move(f);
  } else {
    r["local_factors"] = nullptr;
  }
  return r;
}

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

// --- commands -------------------------------------------------------------

inline ordered_json cmd_classify(Context& ctx, const std::string& path) {
  const auto g = load(ctx, path);
  const std::size_t parties = g.structure().parties();
  if (parties < 2) throw InputError("classify needs at least two parties");
  ordered_json r;
  if (parties == 2) {
    r = class_json(gateclass::classify_two_party(g, ctx.tol));
    r["schmidt_coefficients"] = gateclass::schmidt_rank(g, {0}, ctx.tol).coefficients;
  } else {
    r = class_json(gateclass::multiparty_classify(g, ctx.tol));
  }
  return r;
}

inline ordered_json cmd_minruns(Context& ctx, const std::string& u_path, const std::string& v_path,
                                std::size_t embed, bool local_product, std::size_t max_n) {
  const auto u = load(ctx, u_path);
  const auto v = load(ctx, v_path);
  if (u.structure() != v.structure()) throw InputError("gates have different party structures");
  const auto plan = spectra::min_runs_embedded(u, v, embed, max_n, ctx.tol);

  ordered_json r;
  r["embed"] = embed;
  r["max_n"] = max_n;
  r["verdict"] = plan.distinguishable() ? "Distinguishable" : "NotDistinguishable";
  r["n_runs"] = optional_json(plan.n_runs);
  r["delta_single"] = plan.delta_single;
  r["ceiling_rule"] = optional_json(plan.ceiling_rule);
  r["arc_per_level"] = plan.arc_per_level;
  r["certified_overlap"] = plan.distinguishable() ? ordered_json(plan.certified_overlap) : ordered_json(nullptr);

  if (local_product) {
    if (u.structure().parties() != 2) throw InputError("--local-product needs two-party gates");
    const linalg::UnitaryGate w(u.matrix().adjoint() * v.matrix(), u.structure(), ctx.tol);
    const auto c = gateclass::classify_two_party(w, ctx.tol);
    if (c.label != gateclass::Label::Product || !c.local_factors)
      throw InputError("--local-product: U^dag V is not a product of local gates");
    const auto& f = *c.local_factors;
    const std::size_t at = plan.n_runs.value_or(1);
    const auto arcs = spectra::product_local_arcs(f[0], f[1], at, ctx.tol);
    std::optional<std::size_t> local_n;
    for (std::size_t n = 1; n <= max_n && !local_n; ++n)
      if (spectra::product_local_arcs(f[0], f[1], n, ctx.tol).locally_distinguishable) local_n = n;
    ordered_json lp;
    lp["n"] = at;
    lp["delta_first"] = arcs.delta_first;
    lp["delta_second"] = arcs.delta_second;
    lp["locally_distinguishable"] = arcs.locally_distinguishable;
    lp["local_min_runs"] = optional_json(local_n);
    r["local_product"] = std::move(lp);
  }
  return r;
}

inline ordered_json cmd_kak(Context& ctx, const std::string& path) {
  const auto g = load(ctx, path);
  const auto k = gateclass::kak_decompose(g, ctx.tol);
  ordered_json r;
  r["global_phase"] = io::complex_json(k.global_phase);
  r["canonical_vector"] = k.canonical_vector;
  r["locals_after"] = {io::matrix_json(k.locals_after.first), io::matrix_json(k.locals_after.second)};
  r["locals_before"] = {io::matrix_json(k.locals_before.first), io::matrix_json(k.locals_before.second)};
  r["reconstruction_residual"] = linalg::max_abs_diff(k.reconstruct(), g.matrix());
  return r;
}

inline ordered_json cmd_lie_closure(Context& ctx, const std::string& path) {
  const auto g = load(ctx, path);
  const auto rep = gateclass::lie_closure(g, ctx.tol);
  ordered_json r;
  r["closure_dimension"] = rep.closure_dimension;
  r["matched_partition"] = partition_json(rep.matched_partition);
  r["is_universal_on_partition_products"] = rep.is_universal_on_partition_products;
  if (g.structure().parties() >= 3) r["classification"] = class_json(gateclass::multiparty_classify(g, ctx.tol));
  return r;
}

inline ordered_json cmd_simulate(Context& ctx, const std::vector<std::string>& paths, std::uint64_t seed,
                                 std::size_t trials, const std::string& strategy, const std::string& log_path) {
  if (paths.size() < 2) throw InputError("simulate needs at least two gate files");
  if (trials == 0) throw InputError("--trials must be positive");
  std::vector<linalg::UnitaryGate> hyps;
  for (const auto& p : paths) hyps.push_back(load(ctx, p));
  if ((strategy == "choi" || strategy == "parallel" || strategy == "pipeline2q") && hyps.size() != 2)
    throw InputError("strategy '" + strategy + "' takes exactly two gates");

  ordered_json r;
  r["strategy"] = strategy;
  r["seed"] = seed;
  r["trials"] = trials;
  ordered_json runs = ordered_json::array();
  std::string log;
  std::size_t correct = 0, uses_min = std::numeric_limits<std::size_t>::max(), uses_max = 0, uses_sum = 0;
  double p_min = 1.0;
  std::string detail_strategy, circuit;
  std::size_t copies = 0;

  try {
    for (std::size_t t = 0; t < trials; ++t) {
      const std::uint64_t tseed = linalg::split_seed(seed, t);
      protocol::Oracle oracle(hyps, tseed);
      std::pair<protocol::Verdict, protocol::Transcript> out;
      if (strategy == "choi")
        out = protocol::locc_discriminate(oracle, protocol::Strategy::ChoiSingleRun, tseed, ctx.tol);
      else if (strategy == "parallel")
        out = protocol::locc_discriminate(oracle, protocol::Strategy::ParallelN, tseed, ctx.tol);
      else if (strategy == "pipeline2q")
        out = protocol::two_qubit_pipeline(oracle, tseed, ctx.tol);
      else
        out = protocol::discriminate_many(oracle, tseed, ctx.tol);
      auto& [v, transcript] = out;
      protocol::score(v, oracle);
      correct += *v.correct;
      uses_min = std::min(uses_min, v.oracle_uses);
      uses_max = std::max(uses_max, v.oracle_uses);
      uses_sum += v.oracle_uses;
      p_min = std::min(p_min, v.success_probability_exact);
      if (t == 0) detail_strategy = v.strategy, circuit = v.circuit, copies = v.copies;
      ordered_json run;
      run["trial"] = t;
      run["hidden"] = oracle.reveal_for_scoring();
      run["guessed"] = v.guessed_index;
      run["correct"] = *v.correct;
      run["oracle_uses"] = v.oracle_uses;
      run["tests"] = v.tests;
      run["local"] = protocol::audit_locality(transcript);
      runs.push_back(std::move(run));
      log += "TRIAL " + std::to_string(t) + "\n" + transcript.to_text();
    }
  } catch (const NotDistinguishableError& e) {
    r["verdict"] = "NotDistinguishable";
    r["reason"] = e.what();
    r["pair"] = {e.first(), e.second()};
    return r;
  }

  r["verdict"] = "Distinguishable";
  r["plan"] = {{"strategy", detail_strategy}, {"circuit", circuit}, {"copies", copies}};
  r["success_probability_exact"] = p_min;
  r["correct"] = correct;
  r["oracle_uses"] = {{"min", uses_min},
                      {"max", uses_max},
                      {"mean", static_cast<double>(uses_sum) / static_cast<double>(trials)}};
  r["runs"] = std::move(runs);
  if (!log_path.empty()) {
    std::ofstream f(log_path, std::ios::binary);
    if (!f) throw InputError("cannot write log file " + log_path);
    f << log;
  }
  return r;
}

}  // namespace detail

/// Parses argv, runs one command and returns its exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Perfect LOCC discrimination of unitary gates", "udiscrim"};
  app.require_subcommand(1);
  app.fallthrough();
  detail::Context ctx;
  for (int i = 1; i < argc; ++i) ctx.argv.emplace_back(argv[i]);
  app.add_option("--tol", ctx.tol_overrides, "Override a tolerance, name=value (repeatable)");

  std::string file_a, file_b, log_path, strategy = "eliminate";
  std::vector<std::string> files;
  std::size_t embed = 0, max_n = 12, trials = 1;
  std::uint64_t seed = 0;
  bool local_product = false;

  auto* classify = app.add_subcommand("classify", "Product / product-SWAP / imprimitive classification");
  classify->add_option("gate", file_a, "Gate file")->required();

  auto* minruns = app.add_subcommand("minruns", "Minimal number of parallel uses to discriminate U and V");
  minruns->add_option("u", file_a, "Gate file U")->required();
  minruns->add_option("v", file_b, "Gate file V")->required();
  minruns->add_option("--embed", embed, "Append k unused levels to both gates");
  minruns->add_option("--max-n", max_n, "Largest number of uses tried")->check(CLI::Range(1, 16));
  minruns->add_flag("--local-product", local_product, "Also evaluate the product-input criterion");

  auto* kak = app.add_subcommand("kak", "Canonical decomposition of a two-qubit gate");
  kak->add_option("gate", file_a, "Gate file")->required();

  auto* simulate = app.add_subcommand("simulate", "Run the LOCC protocol against a hidden-gate oracle");
  simulate->add_option("gates", files, "Two or more gate files")->required()->expected(2, -1);
  simulate->add_option("--seed", seed, "Seed")->envname("UDISCRIM_SEED");
  simulate->add_option("--trials", trials, "Independent trials");
  simulate->add_option("--strategy", strategy, "choi | parallel | pipeline2q | eliminate")
      ->check(CLI::IsMember({"choi", "parallel", "pipeline2q", "eliminate"}));
  simulate->add_option("--log", log_path, "Write the transcripts to this file");

  auto* lie = app.add_subcommand("lie-closure", "Dimension of the Lie algebra generated with local gates");
  lie->add_option("gate", file_a, "Gate file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    detail::apply_tolerances(ctx);
    ordered_json result;
    std::string name;
    if (*classify) {
      name = "classify";
      result = detail::cmd_classify(ctx, file_a);
    } else if (*minruns) {
      name = "minruns";
      result = detail::cmd_minruns(ctx, file_a, file_b, embed, local_product, max_n);
    } else if (*kak) {
      name = "kak";
      result = detail::cmd_kak(ctx, file_a);
    } else if (*simulate) {
      name = "simulate";
      result = detail::cmd_simulate(ctx, files, seed, trials, strategy, log_path);
    } else {
      name = "lie-closure";
      result = detail::cmd_lie_closure(ctx, file_a);
    }
    out << detail::report(ctx, name, std::move(result)).dump(2) << "\n";
    return kOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const StrategyInapplicable& e) {
    err << "strategy inapplicable: " << e.what() << "\n";
    return kInapplicable;
  } catch (const NotDistinguishableError& e) {
    err << "not distinguishable: " << e.what() << "\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace udiscrim::cli
