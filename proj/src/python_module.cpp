#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "poalab/basis.hpp"
#include "poalab/characterize.hpp"
#include "poalab/game.hpp"
#include "poalab/io.hpp"
#include "poalab/optimize.hpp"
#include "poalab/worstcase.hpp"

namespace py = pybind11;
using namespace poalab;

namespace {

py::dict report_dict(const PoaReport& r) {
  py::list active;
  for (const auto& row : r.active) {
    active.append(py::dict(py::arg("basis") = row.basis, py::arg("x") = row.triplet.x,
                           py::arg("y") = row.triplet.y, py::arg("z") = row.triplet.z,
                           py::arg("ceiling") = row.ceiling));
  }
  return py::dict(py::arg("side") = std::string(to_string(r.side)), py::arg("poa") = r.poa,
                  py::arg("rho_star") = r.rho_star, py::arg("nu_star") = r.nu_star,
                  py::arg("bounded") = r.bounded, py::arg("nu_ceiling") = r.nu_ceiling,
                  py::arg("active") = active);
}

py::dict rule_dict(const OptimalRule& r) {
  return py::dict(py::arg("label") = r.label, py::arg("f_opt") = r.f_opt,
                  py::arg("rho") = r.rho, py::arg("poa") = r.poa,
                  py::arg("degenerate") = r.degenerate);
}

int checked_n(const std::vector<BasisPair>& pairs) {
  if (pairs.empty()) throw ValidationError("basis list is empty");
  return pairs.front().n();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact price of anarchy for generalized congestion and welfare games";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<VerificationError>(m, "VerificationError", PyExc_RuntimeError);

  py::class_<BasisPair>(m, "BasisPair")
      .def(py::init([](int n, std::vector<double> c, std::vector<double> f, std::string label,
                       const std::string& side) {
             return BasisPair(n, std::move(c), std::move(f), std::move(label),
                              side_from_string(side));
           }),
           py::arg("n"), py::arg("c"), py::arg("f"), py::arg("label") = "pair",
           py::arg("side") = "cost")
      .def_property_readonly("n", &BasisPair::n)
      .def_property_readonly("label", &BasisPair::label)
      .def_property_readonly("side", [](const BasisPair& p) { return std::string(to_string(p.side())); })
      .def_property_readonly("c", [](const BasisPair& p) {
        return std::vector<double>(p.c_values().begin(), p.c_values().end());
      })
      .def_property_readonly("f", [](const BasisPair& p) {
        return std::vector<double>(p.f_values().begin(), p.f_values().end());
      })
      .def("__repr__", [](const BasisPair& p) {
        return "<BasisPair '" + p.label() + "' n=" + std::to_string(p.n()) + ">";
      });

  m.def("polynomial_basis", &polynomial_basis, py::arg("d"), py::arg("n"));
  m.def("polynomial_marginal_cost_basis", &polynomial_marginal_cost_basis, py::arg("d"),
        py::arg("n"));
  m.def("bpr_basis", &bpr_basis, py::arg("n"), py::arg("k_max"), py::arg("free_flow") = 1.0);
  m.def("perception_basis", &perception_basis, py::arg("sigma"), py::arg("gamma"), py::arg("n"));
  m.def("from_congestion",
        [](const std::vector<double>& c, int n, std::string label) {
          return from_congestion(c, n, std::move(label));
        },
        py::arg("c"), py::arg("n"), py::arg("label") = "congestion");
  m.def("marginal_contribution_welfare",
        [](const std::vector<double>& w, int n) { return marginal_contribution_welfare(w, n); },
        py::arg("w"), py::arg("n"));
  m.def("random_concave_welfare", &random_concave_welfare, py::arg("n_vals"), py::arg("seed"));

  m.def("characterize",
        [](const std::vector<BasisPair>& pairs, const std::string& engine, bool full_set) {
          CharacterizeOptions opts;
          opts.engine = engine_from_string(engine);
          opts.full_set = full_set;
          PoaReport report;
          {
            py::gil_scoped_release release;
            report = characterize(pairs, checked_n(pairs), opts);
          }
          return report_dict(report);
        },
        py::arg("pairs"), py::arg("engine") = "simplex", py::arg("full_set") = false);
  m.def("optimize_rule",
        [](const BasisPair& pair, bool normalize) {
          OptimizeOptions opts;
          opts.normalize = normalize;
          return rule_dict(optimize_rule(pair, opts));
        },
        py::arg("pair"), py::arg("normalize") = false);
  m.def("optimize_class",
        [](const std::vector<BasisPair>& pairs) {
          std::vector<OptimalRule> rules;
          {
            py::gil_scoped_release release;
            rules = optimize_class(pairs, checked_n(pairs));
          }
          py::list out;
          for (const auto& r : rules) out.append(rule_dict(r));
          return py::make_tuple(class_poa_from_rules(rules), out);
        },
        py::arg("pairs"));
  m.def("optimize_fixed_incentive",
        [](const std::vector<std::vector<double>>& costs, int n, bool lock) {
          const auto r = optimize_fixed_incentive(costs, n, {}, lock);
          return py::dict(py::arg("tau") = r.tau, py::arg("poa") = r.poa, py::arg("rho") = r.rho,
                          py::arg("nu") = r.nu, py::arg("tau_available") = r.tau_available);
        },
        py::arg("costs"), py::arg("n"), py::arg("lock_incentive") = false);

  // Games cross the boundary as JSON text in the documented schema.
  m.def("worst_case_game",
        [](const std::vector<BasisPair>& pairs, double eta) {
          const int n = checked_n(pairs);
          const auto report = characterize_cost(pairs, n);
          const auto recipe = extract_recipe(report, pairs, n, eta);
          const auto built = build_game(recipe, pairs, n);
          Json meta;
          meta["scenario"] = std::string(to_string(recipe.scenario));
          meta["eta"] = recipe.eta;
          meta["target_poa"] = recipe.target_poa;
          meta["a_ne"] = built.a_ne;
          meta["a_opt"] = built.a_opt;
          return game_to_json(built.game, meta).dump();
        },
        py::arg("pairs"), py::arg("eta") = kDefaultUnboundedEta);
  m.def("enumerate_equilibria",
        [](const std::string& game_json) {
          const auto doc = game_from_json(Json::parse(game_json));
          OracleReport r;
          {
            py::gil_scoped_release release;
            r = enumerate_equilibria(doc.game);
          }
          return py::dict(py::arg("poa") = r.poa, py::arg("poa_defined") = r.poa_defined,
                          py::arg("best_value") = r.best_value,
                          py::arg("worst_eq_value") = r.worst_eq_value,
                          py::arg("num_equilibria") = r.num_equilibria,
                          py::arg("num_profiles") = r.num_profiles);
        },
        py::arg("game_json"));
  m.def("is_nash",
        [](const std::string& game_json, const Allocation& a) {
          return is_nash(game_from_json(Json::parse(game_json)).game, a);
        },
        py::arg("game_json"), py::arg("allocation"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out;
          std::ostringstream err;
          int code = 0;
          {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
