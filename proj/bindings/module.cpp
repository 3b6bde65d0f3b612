#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hiring/block_build.hpp"
#include "hiring/canonical.hpp"
#include "hiring/exact.hpp"
#include "hiring/ptas.hpp"
#include "hiring/qptas.hpp"
#include "hiring/simulate.hpp"

namespace py = pybind11;
using namespace hiring;

namespace {

Instance make_instance(std::vector<double> values, std::vector<double> probs, int k, int T) {
  Instance inst;
  inst.n = static_cast<int>(values.size());
  inst.values = std::move(values);
  inst.probs = std::move(probs);
  inst.k = k;
  inst.T = T;
  require_valid(inst);
  return inst;
}

py::dict sim_to_dict(const SimReport& r) {
  py::dict d;
  d["trials"] = r.trials;
  d["mean_reward"] = r.mean_reward;
  d["std_error"] = r.std_error;
  d["seed"] = r.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hiring, m) {
  m.doc() = "sequential hiring: exact and approximate adaptive offering policies";

  py::class_<Instance>(m, "Instance")
      .def(py::init(&make_instance), py::arg("values"), py::arg("probs"), py::arg("k"),
           py::arg("T"))
      .def_readonly("n", &Instance::n)
      .def_readonly("values", &Instance::values)
      .def_readonly("probs", &Instance::probs)
      .def_readonly("k", &Instance::k)
      .def_readonly("T", &Instance::T)
      .def("to_json", &Instance::to_json)
      .def_static("from_json", &Instance::from_json);

  py::class_<DecisionTree>(m, "DecisionTree")
      .def("to_json", &DecisionTree::to_json)
      .def_static("from_json", &DecisionTree::from_json)
      .def("node_count", &reachable_count)
      .def("depth", &tree_depth);

  py::class_<BlockTree>(m, "BlockTree")
      .def("to_json", &BlockTree::to_json)
      .def_static("from_json", &BlockTree::from_json)
      .def("node_count", &block_reachable_count)
      .def("depth", &block_tree_depth)
      .def("has_coins", &BlockTree::has_coins);

  m.def("validate_instance", [](const Instance& inst) -> py::object {
    if (auto v = validate_instance(inst)) return py::cast(v->message);
    return py::none();
  });

  m.def(
      "generate_instance",
      [](int n, int k, int T, std::uint64_t seed) {
        GenSpec spec;
        spec.n = n;
        spec.k = k;
        spec.T = T;
        spec.seed = seed;
        return generate_instance(spec);
      },
      py::arg("n"), py::arg("k"), py::arg("T"), py::arg("seed") = 0);

  m.def("tree_reward",
        [](const DecisionTree& tree, const Instance& inst) { return tree_reward(tree, inst); });
  m.def("block_tree_reward", [](const BlockTree& tree, const Instance& inst) {
    return block_tree_reward(tree, inst);
  });
  m.def("block_tree_to_std", &block_tree_to_std);

  m.def("optimal_exact", [](const Instance& inst) {
    auto result = optimal_exact(inst);
    return py::make_tuple(result.value, std::move(result.tree));
  });
  m.def("greedy_dp", [](const Instance& inst) {
    auto result = greedy_dp(inst);
    return py::make_tuple(result.value, std::move(result.tree));
  });

  m.def(
      "rounded_instances",
      [](const Instance& inst, double eps) {
        const auto rounded = build_rounded(inst, eps);
        return py::make_tuple(rounded.up, rounded.mixed, rounded.partition.class_of);
      },
      py::arg("instance"), py::arg("eps"),
      "returns (rounded_up, mixed_rounded, class_of) for the given epsilon");

  m.def(
      "qptas",
      [](const Instance& inst, double eps) {
        const auto rounded = build_rounded(inst, eps);
        const auto solved = qptas_solve(rounded.mixed, rounded.partition);
        DecisionTree tree = qptas_policy_tree(solved.memo, rounded.mixed, rounded.partition);
        const double on_original = tree_reward(tree, inst, tree.root);
        return py::make_tuple(on_original, solved.value, std::move(tree));
      },
      py::arg("instance"), py::arg("eps"),
      "returns (reward_on_original, value_on_mixed, policy_tree)");

  m.def(
      "build_block_policy",
      [](const Instance& inst, double eps) {
        const auto rounded = build_rounded(inst, eps);
        const auto solved = qptas_solve(rounded.mixed, rounded.partition);
        const DecisionTree qtree =
            qptas_policy_tree(solved.memo, rounded.mixed, rounded.partition);
        auto built = build_block_tree(qtree, rounded.mixed, rounded.partition, eps);
        return std::move(built.tree);
      },
      py::arg("instance"), py::arg("eps"),
      "compresses the mixed-instance optimal tree into a block-responsive tree");

  m.def(
      "ptas",
      [](const Instance& inst, double eps, std::uint64_t budget) {
        PtasOptions opts;
        opts.budget = budget;
        auto result = ptas_solve(inst, eps, opts);
        py::dict d;
        d["regime"] = result.regime == Regime::ManyPositions ? "ManyPositions" : "FewPositions";
        d["value_mixed"] = result.value_mixed;
        d["value_original"] = result.value_original;
        d["report_json"] = result.report_json;
        if (result.block_policy) d["block_policy"] = std::move(*result.block_policy);
        if (result.std_policy) d["std_policy"] = std::move(*result.std_policy);
        return d;
      },
      py::arg("instance"), py::arg("eps"), py::arg("budget") = std::uint64_t{10'000'000});

  m.def("canonicalize", [](const DecisionTree& tree, const Instance& inst) {
    auto [out, report] = canonicalize(tree, inst);
    py::dict d;
    d["modified"] = report.modified;
    d["case1_count"] = report.case1_count;
    d["case2_count"] = report.case2_count;
    d["reward_before"] = report.reward_before;
    d["reward_after"] = report.reward_after;
    return py::make_tuple(std::move(out), d);
  });

  m.def("check_canonical", [](const DecisionTree& tree, const Instance& inst) -> py::object {
    if (auto v = check_canonical(tree, inst))
      return py::cast("node " + std::to_string(v->node) + " violates property " +
                      std::to_string(v->property));
    return py::none();
  });

  m.def("classify_regime", [](const Instance& inst, double eps) {
    return classify_regime(inst, eps).regime == Regime::ManyPositions ? "ManyPositions"
                                                                      : "FewPositions";
  });
  m.def("many_positions_factor", &many_positions_factor);

  m.def(
      "simulate",
      [](const DecisionTree& tree, const Instance& inst, std::uint64_t trials,
         std::uint64_t seed) { return sim_to_dict(simulate(tree, inst, trials, seed)); },
      py::arg("tree"), py::arg("instance"), py::arg("trials"), py::arg("seed") = 0);
  m.def(
      "simulate_block",
      [](const BlockTree& tree, const Instance& inst, std::uint64_t trials, std::uint64_t seed) {
        return sim_to_dict(simulate(tree, inst, trials, seed));
      },
      py::arg("tree"), py::arg("instance"), py::arg("trials"), py::arg("seed") = 0);
}
