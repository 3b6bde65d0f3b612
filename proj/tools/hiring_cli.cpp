#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "hiring/block_build.hpp"
#include "hiring/canonical.hpp"
#include "hiring/exact.hpp"
#include "hiring/ptas.hpp"
#include "hiring/qptas.hpp"
#include "hiring/simulate.hpp"

using namespace hiring;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRefusal = 2;
constexpr int kExitAuditFail = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Instance load_instance(const std::string& path) {
  const Instance inst = Instance::from_json(read_file(path));
  require_valid(inst);
  return inst;
}

double now_ms(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

int cmd_gen(const std::string& out, int n, int k, int T, const std::string& vdist,
            const std::string& pdist, std::uint64_t seed) {
  GenSpec spec;
  spec.n = n;
  spec.k = k;
  spec.T = T;
  spec.value_dist = DistSpec::parse(vdist);
  spec.prob_dist = DistSpec::parse(pdist);
  spec.seed = seed;
  const Instance inst = generate_instance(spec);
  write_output(out, inst.to_json());
  return kExitOk;
}

json solve_one(const Instance& inst, const std::string& solver, double eps,
               std::uint64_t budget) {
  const auto t0 = std::chrono::steady_clock::now();
  json out;
  out["solver"] = solver;
  double value = 0.0;

  if (solver == "exact") {
    const auto result = optimal_exact(inst);
    value = result.value;
    out["policy"] = json::parse(result.tree.to_json());
  } else if (solver == "greedy") {
    const auto result = greedy_dp(inst);
    value = result.value;
    out["policy"] = json::parse(result.tree.to_json());
  } else if (solver == "qptas") {
    const auto rounded = build_rounded(inst, eps);
    const auto solved = qptas_solve(rounded.mixed, rounded.partition);
    const DecisionTree tree = qptas_policy_tree(solved.memo, rounded.mixed, rounded.partition);
    value = tree_reward(tree, inst, tree.root);
    out["eps"] = eps;
    out["value_mixed"] = solved.value;
    out["policy"] = json::parse(tree.to_json());
  } else if (solver == "ptas") {
    PtasOptions opts;
    opts.budget = budget;
    const auto result = ptas_solve(inst, eps, opts);
    value = result.value_original;
    out["eps"] = eps;
    out["value_mixed"] = result.value_mixed;
    out["report"] = json::parse(result.report_json);
    if (result.block_policy) out["policy"] = json::parse(result.block_policy->to_json());
    if (result.std_policy) out["policy"] = json::parse(result.std_policy->to_json());
  } else {
    throw CLI::ValidationError("unknown solver " + solver);
  }

  out["value"] = value;
  if (solver != "exact" && inst.n <= kOracleMaxN) {
    const double opt = optimal_exact_value(inst);
    out["oracle_value"] = opt;
    out["oracle_ratio"] = opt > 0.0 ? value / opt : 1.0;
  }
  out["wall_time_ms"] = now_ms(t0);
  return out;
}

int cmd_solve(const std::string& in, const std::string& out_path, const std::string& solver,
              double eps, std::uint64_t budget) {
  const Instance inst = load_instance(in);
  const json out = solve_one(inst, solver, eps, budget);
  write_output(out_path, out.dump());
  return kExitOk;
}

int cmd_compare(const std::string& in, const std::string& out_path,
                const std::vector<std::string>& solvers, const std::vector<double>& eps_list,
                std::uint64_t budget) {
  const Instance inst = load_instance(in);
  json rows = json::array();
  for (const auto& solver : solvers) {
    if (solver == "exact" || solver == "greedy") {
      json row = solve_one(inst, solver, 0.5, budget);
      row.erase("policy");
      rows.push_back(std::move(row));
      continue;
    }
    for (const double eps : eps_list) {
      json row = solve_one(inst, solver, eps, budget);
      row.erase("policy");
      rows.push_back(std::move(row));
    }
  }
  json out;
  out["instance"] = in;
  out["results"] = std::move(rows);
  write_output(out_path, out.dump());
  return kExitOk;
}

struct AuditRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

// Runs the structural-inequality checks end to end on one instance.
std::vector<AuditRow> run_audit(const Instance& inst, double eps, std::uint64_t trials,
                                std::uint64_t seed, bool break_tree) {
  std::vector<AuditRow> rows;
  auto push_ge = [&](const std::string& name, double lhs, double rhs) {
    rows.push_back({name, lhs, rhs, lhs >= rhs - kRelTol * (1.0 + std::abs(rhs))});
  };

  const bool oracle_ok = inst.n <= kOracleMaxN;
  const auto rounded = build_rounded(inst, eps);

  // a policy tree to exercise the standard-tree checks: greedy keeps this
  // runnable beyond oracle scale
  const DecisionTree base_tree = oracle_ok ? optimal_exact(inst).tree : greedy_dp(inst).tree;

  auto [canon_i, rep_i] = canonicalize(base_tree, inst);
  if (break_tree && !canon_i.at(canon_i.root).is_leaf()) {
    // deliberately damage the canonical tree so the audit must fail
    canon_i.at(canon_i.root).left = canon_i.at(canon_i.root).right;
    rep_i.reward_after = tree_reward(canon_i, inst, canon_i.root) - 1.0;
  }
  push_ge("canonicalize_reward_monotone", rep_i.reward_after, rep_i.reward_before);
  rows.push_back({"canonicalize_output_canonical", check_canonical(canon_i, inst) ? 1.0 : 0.0, 0.0,
                  !check_canonical(canon_i, inst).has_value() && !break_tree});

  const double r_i = tree_reward(canon_i, inst, canon_i.root);
  const double r_i_mixed = tree_reward(canon_i, rounded.mixed, canon_i.root);
  push_ge("mixed_reward_round_down", r_i_mixed, (1.0 - 2.0 * eps) * r_i);

  auto [canon_m, rep_m] = canonicalize(base_tree, rounded.mixed);
  const double m_mixed = tree_reward(canon_m, rounded.mixed, canon_m.root);
  const double m_orig = tree_reward(canon_m, inst, canon_m.root);
  push_ge("original_dominates_mixed", m_orig, m_mixed);

  const auto solved = qptas_solve(rounded.mixed, rounded.partition);
  const DecisionTree qtree = qptas_policy_tree(solved.memo, rounded.mixed, rounded.partition);
  if (oracle_ok) {
    const double opt_mixed = optimal_exact_value(rounded.mixed);
    rows.push_back({"class_dp_lossless", solved.value, opt_mixed,
                    std::abs(solved.value - opt_mixed) <= 1e-12 * (1.0 + std::abs(opt_mixed))});
  }
  rows.push_back({"class_dp_canonical",
                  check_canonical(qtree, rounded.mixed) ? 1.0 : 0.0, 0.0,
                  !check_canonical(qtree, rounded.mixed).has_value()});

  const auto built = build_block_tree(qtree, rounded.mixed, rounded.partition, eps);
  const double eps3 = eps * eps * eps;
  double min_psi = 1.0;
  bool has_multi = false;
  for (const auto& node : built.tree.nodes) {
    if (node.block.size() >= 2) {
      has_multi = true;
      min_psi = std::min(min_psi, rejection_probability(node.block, rounded.mixed));
    }
  }
  if (has_multi) push_ge("block_rejection_floor", min_psi, 1.0 - eps3);

  const double block_mixed = block_tree_reward(built.tree, rounded.mixed, built.tree.root);
  push_ge("block_compression_reward", block_mixed, (1.0 - 4.0 * eps3 * inst.k) * solved.value);

  auto [bcanon, brep] = canonicalize_block(built.tree, rounded.mixed);
  push_ge("block_canonicalize_reward_monotone", brep.reward_after, brep.reward_before);
  const double bc_mixed = block_tree_reward(bcanon, rounded.mixed, bcanon.root);
  const double bc_orig = block_tree_reward(bcanon, inst, bcanon.root);
  push_ge("block_original_dominates_mixed", bc_orig, bc_mixed);

  if (classify_regime(inst, eps).regime == Regime::FewPositions && oracle_ok) {
    const auto ptas = ptas_solve(inst, eps);
    const double opt_mixed = optimal_exact_value(rounded.mixed);
    push_ge("candidate_family_quality", ptas.value_mixed, (1.0 - 7.0 * eps) * opt_mixed);
  }

  if (trials > 0) {
    const SimReport sim = simulate(qtree, rounded.mixed, trials, seed);
    const double analytic = tree_reward(qtree, rounded.mixed, qtree.root);
    rows.push_back({"mc_calibration", sim.mean_reward, analytic,
                    std::abs(sim.mean_reward - analytic) <= 4.0 * sim.std_error + 1e-12});
  }
  return rows;
}

int cmd_audit(const std::string& in, const std::string& out_path, double eps,
              std::uint64_t trials, std::uint64_t seed, bool break_tree) {
  const Instance inst = load_instance(in);
  const auto rows = run_audit(inst, eps, trials, seed, break_tree);
  std::string csv = "name,lhs,rhs,slack,pass\n";
  bool all_pass = true;
  for (const auto& row : rows) {
    csv += row.name + "," + fmt17(row.lhs) + "," + fmt17(row.rhs) + "," +
           fmt17(row.lhs - row.rhs) + "," + (row.pass ? "pass" : "fail") + "\n";
    all_pass = all_pass && row.pass;
  }
  write_output(out_path, csv);
  return all_pass ? kExitOk : kExitAuditFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sequential hiring: exact, greedy, QPTAS and PTAS solvers"};
  app.require_subcommand(1);

  std::string in_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::uint64_t trials = 100'000;
  std::uint64_t budget = 10'000'000;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random instance");
  int gen_n = 8, gen_k = 2, gen_t = 6;
  std::string gen_values = "uniform 0 1";
  std::string gen_probs = "uniform 0 1";
  gen->add_option("--n", gen_n, "applicants")->required();
  gen->add_option("--k", gen_k, "open positions");
  gen->add_option("--T", gen_t, "stages");
  gen->add_option("--values", gen_values, "value distribution: 'uniform LO HI' or 'point X'");
  gen->add_option("--probs", gen_probs, "probability distribution");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_path, "output file (default stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver on an instance");
  std::string solver = "exact";
  double eps = 0.5;
  solve->add_option("--in", in_path, "instance JSON")->required();
  solve->add_option("--solver", solver, "exact|greedy|qptas|ptas")
      ->check(CLI::IsMember({"exact", "greedy", "qptas", "ptas"}));
  solve->add_option("--eps", eps, "epsilon for the approximation schemes");
  solve->add_option("--budget", budget, "PTAS candidate budget");
  solve->add_option("--out", out_path, "output file (default stdout)");

  // compare
  auto* compare = app.add_subcommand("compare", "run several solvers side by side");
  std::vector<std::string> solvers{"exact", "greedy", "qptas", "ptas"};
  std::vector<double> eps_list{0.5};
  compare->add_option("--in", in_path, "instance JSON")->required();
  compare->add_option("--solvers", solvers, "subset of exact,greedy,qptas,ptas");
  compare->add_option("--eps", eps_list, "epsilon values for the schemes");
  compare->add_option("--budget", budget, "PTAS candidate budget");
  compare->add_option("--out", out_path, "output file (default stdout)");

  // audit
  auto* audit = app.add_subcommand("audit", "run the structural inequalities end to end");
  bool break_tree = false;
  audit->add_option("--in", in_path, "instance JSON")->required();
  audit->add_option("--eps", eps, "epsilon");
  audit->add_option("--trials", trials, "Monte Carlo trials for the calibration row");
  audit->add_option("--seed", seed, "Monte Carlo seed");
  audit->add_option("--out", out_path, "output CSV (default stdout)");
  audit->add_flag("--break-tree", break_tree, "damage a tree on purpose (negative testing)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(out_path, gen_n, gen_k, gen_t, gen_values, gen_probs, seed);
    if (solve->parsed()) return cmd_solve(in_path, out_path, solver, eps, budget);
    if (compare->parsed()) return cmd_compare(in_path, out_path, solvers, eps_list, budget);
    if (audit->parsed()) return cmd_audit(in_path, out_path, eps, trials, seed, break_tree);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRefusal;
  }
  return kExitUsage;
}
