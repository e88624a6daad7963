#include "cmablb/bounds.hpp"
#include "cmablb/instance.hpp"
#include "cmablb/io.hpp"
#include "cmablb/sim.hpp"
#include "cmablb/smoothness.hpp"
#include "cmablb/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace cmablb;

namespace {

// Structured results cross the boundary as JSON text; the Python side parses
// them, which keeps one serialization for the CLI and the module.
std::string text(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lower-bound instances and smoothness measures for combinatorial semi-bandits";

  py::class_<RewardModel, std::shared_ptr<RewardModel>>(m, "Reward")
      .def_property_readonly("name", &RewardModel::name)
      .def_property_readonly("action_size", &RewardModel::action_size)
      .def_property_readonly("monotone", &RewardModel::monotone)
      .def("evaluate", &RewardModel::evaluate, py::arg("mu"))
      .def("gradient", &RewardModel::gradient, py::arg("mu"));

  m.def("reward_names", &reward_names);
  m.def(
      "make_reward",
      [](const std::string& name, std::size_t k, std::size_t copies) {
        // pybind11 holders cannot be const; the model is immutable anyway.
        return std::const_pointer_cast<RewardModel>(make_reward(name, k, copies));
      },
      py::arg("name"), py::arg("k"), py::arg("copies") = 1);
  m.def("finite_diff_gradient", &finite_diff_gradient, py::arg("reward"), py::arg("mu"), py::arg("h") = 1e-5);

  m.def(
      "smoothness",
      [](const RewardModel& r, const Vector& mu, const std::vector<std::size_t>& subset) {
        return text(to_json(smoothness_report(r, mu, SubsetSpec(static_cast<std::size_t>(mu.size()), subset))));
      },
      py::arg("reward"), py::arg("mu"), py::arg("subset") = std::vector<std::size_t>{});
  m.def(
      "maximize",
      [](const RewardModel& r, const Vector& mu, const std::string& measure, const std::string& objective,
         const std::string& method, unsigned workers) {
        const Measure ms = parse_measure(measure);
        const Objective ob = parse_objective(objective);
        const SearchMethod me = parse_search_method(method);
        return text(to_json(maximize_over_subsets(ms, ob, r, mu, me, workers), ms, ob, me));
      },
      py::arg("reward"), py::arg("mu"), py::arg("measure") = "modified", py::arg("objective") = "raw",
      py::arg("method") = "brute", py::arg("workers") = 1);

  m.def(
      "bounds",
      [](const RewardModel& r, const Vector& mu, std::size_t arms, std::optional<double> gap,
         std::optional<double> horizon, std::size_t copies) {
        if (gap.has_value() == horizon.has_value()) throw py::value_error("pass exactly one of gap or horizon");
        const BoundReport base = gap ? dependent_bound(r, mu, arms, *gap) : independent_bound(r, mu, arms, *horizon);
        return text(to_json(sum_copies_bound(base, copies)));
      },
      py::arg("reward"), py::arg("mu"), py::arg("m"), py::arg("gap") = py::none(), py::arg("horizon") = py::none(),
      py::arg("copies") = 1);

  m.def(
      "build",
      [](const RewardModel& r, const Vector& mu, std::size_t arms, std::optional<double> gap,
         std::optional<double> horizon, std::optional<std::size_t> optimal_index) {
        if (gap.has_value() == horizon.has_value()) throw py::value_error("pass exactly one of gap or horizon");
        BuildOptions options;
        options.optimal_index = optimal_index;
        const DisjointInstance inst = gap ? build_dependent_instance(r, mu, *gap, arms, options)
                                          : build_independent_instance(r, mu, arms, *horizon, options);
        return text(to_json(inst));
      },
      py::arg("reward"), py::arg("mu"), py::arg("m"), py::arg("gap") = py::none(), py::arg("horizon") = py::none(),
      py::arg("optimal_index") = py::none());

  m.def(
      "sample_round",
      [](const std::string& instance, std::size_t action, std::uint64_t seed) {
        Rng rng(seed);
        return sample_round(instance_from_json(Json::parse(instance)), rng, action);
      },
      py::arg("instance"), py::arg("action"), py::arg("seed"));

  m.def(
      "simulate",
      [](const std::string& instance, const std::string& strategy, std::uint64_t horizon,
         const std::vector<std::uint64_t>& seeds, unsigned workers, double epsilon) {
        const DisjointInstance inst = instance_from_json(Json::parse(instance));
        StrategyOptions options;
        options.epsilon = epsilon;
        std::vector<RegretTrace> traces;
        {
          py::gil_scoped_release release;
          traces = run_replications(inst, parse_strategy(strategy), horizon, seeds, workers, options);
        }
        Json out{{"csv", traces_to_csv(traces)}};
        if (traces.size() >= kMinSeeds) out["summary"] = to_json(compare_to_bound(traces, inst));
        return text(out);
      },
      py::arg("instance"), py::arg("strategy"), py::arg("horizon"), py::arg("seeds"), py::arg("workers") = 1,
      py::arg("epsilon") = StrategyOptions{}.epsilon);

  m.def("suite_names", &suite_names);
  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t seed, std::size_t trials) {
        py::gil_scoped_release release;
        return text(to_json(run_suite(suite, seed, trials)));
      },
      py::arg("suite") = "all", py::arg("seed") = 1, py::arg("trials") = 1000);

  py::register_exception<GapUnreachable>(m, "GapUnreachable", PyExc_ValueError);
  py::register_exception<HorizonTooShort>(m, "HorizonTooShort", PyExc_ValueError);
}
