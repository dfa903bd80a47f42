#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mima/accel.hpp"
#include "mima/oracle_grid.hpp"

namespace py = pybind11;
using namespace mima;

PYBIND11_MODULE(mima_core, m) {
  m.doc() = "micro-macro acceleration for stiff SDEs";

  py::class_<ConfigurationSpace>(m, "ConfigurationSpace")
      .def_static("torus", &ConfigurationSpace::torus, py::arg("dim") = 1)
      .def_static("real_line", &ConfigurationSpace::real_line,
                  py::arg("dim") = 1)
      .def("wrap", &ConfigurationSpace::wrap)
      .def("distance", &ConfigurationSpace::distance)
      .def_property_readonly("is_torus", &ConfigurationSpace::is_torus);

  py::class_<SdeModel>(m, "SdeModel")
      .def_readonly("space", &SdeModel::space)
      .def_readonly("label", &SdeModel::label)
      .def("drift", [](const SdeModel& s, double x) { return s.drift(x); })
      .def("diffusion",
           [](const SdeModel& s, double x) { return s.diffusion(x); });
  m.def("pure_diffusion_torus", &models::pure_diffusion_torus);
  m.def("ornstein_uhlenbeck", &models::ornstein_uhlenbeck, py::arg("theta"),
        py::arg("sigma"));
  m.def("nonlinear_torus", &models::nonlinear_torus);
  m.def("model_by_label", &models::by_label, py::arg("label"));

  py::class_<NormalStream>(m, "NormalStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("substream") = 0)
      .def("normal", &NormalStream::normal, py::arg("step"),
           py::arg("particle"), py::arg("channel") = 0)
      .def("substream", &NormalStream::substream, py::arg("id"));

  py::class_<WeightedEnsemble>(m, "WeightedEnsemble")
      .def(py::init<std::vector<double>, ConfigurationSpace, std::string>(),
           py::arg("positions"), py::arg("space"),
           py::arg("seed_lineage") = "")
      .def(py::init<std::vector<double>, std::vector<double>,
                    ConfigurationSpace, std::string>(),
           py::arg("positions"), py::arg("weights"), py::arg("space"),
           py::arg("seed_lineage") = "")
      .def_property_readonly("positions", &WeightedEnsemble::positions)
      .def_property_readonly("weights", &WeightedEnsemble::weights)
      .def("__len__", &WeightedEnsemble::size)
      .def("reweighted", &WeightedEnsemble::reweighted);
  m.def("expectation", &expectation, py::arg("ensemble"), py::arg("f"));
  m.def("discrete_relative_entropy", &discrete_relative_entropy, py::arg("nu"),
        py::arg("mu"));
  m.def("total_variation", &total_variation, py::arg("nu"), py::arg("mu"));

  py::enum_<RestrictionFamily>(m, "RestrictionFamily")
      .value("Trigonometric", RestrictionFamily::Trigonometric)
      .value("ScaledPower", RestrictionFamily::ScaledPower)
      .value("Custom", RestrictionFamily::Custom);
  py::class_<RestrictionSet>(m, "RestrictionSet")
      .def_property_readonly("level", &RestrictionSet::level)
      .def_property_readonly("family", &RestrictionSet::family)
      .def("eval", &RestrictionSet::eval, py::arg("l"), py::arg("x"))
      .def("prefix", &RestrictionSet::prefix, py::arg("level"))
      .def("names", [](const RestrictionSet& R) {
        std::vector<std::string> out;
        for (int l = 0; l < R.level(); ++l) out.push_back(R.at(l).name);
        return out;
      });
  m.def("trig_family", &trig_family, py::arg("level"));
  m.def("scaled_power_family", &scaled_power_family, py::arg("level"));
  m.def("family_by_name", &family_by_name, py::arg("name"), py::arg("level"));

  py::class_<MacroState>(m, "MacroState")
      .def(py::init([](std::vector<double> m_) {
             return MacroState{std::move(m_)};
           }),
           py::arg("m"))
      .def_readwrite("m", &MacroState::m)
      .def("prefix", &MacroState::prefix);
  m.def("restrict_ensemble", &restrict_ensemble, py::arg("R"),
        py::arg("ensemble"));

  py::enum_<MatchStatus>(m, "MatchStatus")
      .value("Converged", MatchStatus::Converged)
      .value("Infeasible", MatchStatus::Infeasible)
      .value("MaxIterations", MatchStatus::MaxIterations);
  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("tol_moment", &SolverOptions::tol_moment)
      .def_readwrite("max_iter", &SolverOptions::max_iter)
      .def_readwrite("lambda_cap", &SolverOptions::lambda_cap);
  py::class_<MatchOutcome>(m, "MatchOutcome")
      .def_readonly("matched", &MatchOutcome::matched)
      .def_readonly("entropy", &MatchOutcome::entropy)
      .def_readonly("iterations", &MatchOutcome::iterations)
      .def_readonly("residual", &MatchOutcome::residual)
      .def_readonly("status", &MatchOutcome::status)
      .def_property_readonly("lambda_", [](const MatchOutcome& o) {
        return o.multipliers.lambda;
      });
  m.def("match", &match, py::arg("m"), py::arg("prior"), py::arg("R"),
        py::arg("opts") = SolverOptions{});

  m.def("extrapolate", &extrapolate, py::arg("m0"), py::arg("m1"),
        py::arg("dtau"), py::arg("dt"));

  py::class_<AccelConfig>(m, "AccelConfig")
      .def(py::init<>())
      .def_readwrite("horizon", &AccelConfig::horizon)
      .def_readwrite("dt_macro", &AccelConfig::dt_macro)
      .def_readwrite("window", &AccelConfig::window)
      .def_readwrite("micro_steps", &AccelConfig::micro_steps)
      .def_readwrite("particles", &AccelConfig::particles)
      .def_readwrite("family", &AccelConfig::family)
      .def_readwrite("level", &AccelConfig::level)
      .def_readwrite("seed", &AccelConfig::seed)
      .def_readwrite("adaptive", &AccelConfig::adaptive)
      .def("macro_step_count", &AccelConfig::macro_step_count);
  py::class_<MacroStepRecord>(m, "MacroStepRecord")
      .def_readonly("index", &MacroStepRecord::index)
      .def_readonly("t_start", &MacroStepRecord::t_start)
      .def_readonly("dt_used", &MacroStepRecord::dt_used)
      .def_readonly("halvings", &MacroStepRecord::halvings)
      .def_readonly("extrapolated", &MacroStepRecord::extrapolated)
      .def_readonly("entropy", &MacroStepRecord::entropy);
  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("steps", &TrajectoryRecord::steps)
      .def_readonly("max_entropy", &TrajectoryRecord::max_entropy)
      .def_property_readonly("terminal", [](const TrajectoryRecord& t) {
        return *t.terminal;
      });
  m.def("run_accelerated", &run_accelerated, py::arg("config"),
        py::arg("model"), py::arg("initial"));
  m.def("run_reference", &run_reference, py::arg("model"), py::arg("initial"),
        py::arg("horizon"), py::arg("dt_fine"), py::arg("rng"));
  m.def("default_initial_ensemble", &default_initial_ensemble,
        py::arg("model"), py::arg("particles"), py::arg("rng"));

  py::class_<GridDensity>(m, "GridDensity")
      .def(py::init<std::vector<double>, double>(), py::arg("values"),
           py::arg("length") = 1.0)
      .def_static("from_function", &GridDensity::from_function, py::arg("f"),
                  py::arg("cells"), py::arg("length") = 1.0)
      .def_property_readonly("values", &GridDensity::values)
      .def_property_readonly("length", &GridDensity::length);
  m.def("fp_evolve", &fp_evolve, py::arg("p"), py::arg("model"),
        py::arg("time"), py::arg("cfl_safety") = 0.8);
  m.def("grid_entropy", &grid_entropy, py::arg("p"), py::arg("q"));
  m.def("grid_total_variation", &grid_total_variation, py::arg("p"),
        py::arg("q"));
  m.def("restrict_grid", &restrict_grid, py::arg("R"), py::arg("p"));
  m.def("fisher_information", &fisher_information, py::arg("p"),
        py::arg("model"));
  m.def("matched_expansion_coefficient", &matched_expansion_coefficient,
        py::arg("p"), py::arg("model"), py::arg("R"));
}
