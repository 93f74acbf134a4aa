// Python module exposing the toolkit's main operations.  Matrices and
// vectors cross the boundary as complex numpy arrays.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nhqm/born.hpp"
#include "nhqm/geophase.hpp"

namespace py = pybind11;
using namespace nhqm;

namespace {

py::dict classification_dict(const Classification& c) {
  py::dict d;
  d["kind"] = kind_name(c.kind);
  d["spectrum"] = CVec(c.spectrum);
  d["diagnostics"] = c.diagnostics;
  if (c.witness_metric) d["witness_metric"] = c.witness_metric->g;
  return d;
}

}  // namespace

PYBIND11_MODULE(nhqm, m) {
  m.doc() = "finite-dimensional non-Hermitian quantum mechanics toolkit";

  py::register_exception<Error>(m, "NhqmError");

  py::class_<EigSystem>(m, "EigSystem")
      .def_property_readonly("eigenvalues", [](const EigSystem& s) { return CVec(s.eigenvalues); })
      .def_property_readonly("right", [](const EigSystem& s) { return CMat(s.right); })
      .def_property_readonly("left", [](const EigSystem& s) { return CMat(s.left); })
      .def_readonly("residual", &EigSystem::residual)
      .def_readonly("frame_condition", &EigSystem::frame_condition)
      .def("__repr__", [](const EigSystem& s) {
        return "<EigSystem dim=" + std::to_string(s.dim()) +
               " kappa=" + std::to_string(s.frame_condition) + ">";
      });

  py::class_<MetricOp>(m, "MetricOp")
      .def_property_readonly("g", [](const MetricOp& g) { return CMat(g.g); })
      .def_property_readonly("sqrt", [](const MetricOp& g) { return CMat(g.sqrt); })
      .def_property_readonly("inv_sqrt", [](const MetricOp& g) { return CMat(g.inv_sqrt); })
      .def_readonly("min_eig", &MetricOp::min_eig)
      .def_readonly("max_eig", &MetricOp::max_eig)
      .def_static("from_matrix", &MetricOp::from_matrix, py::arg("g"), py::arg("tol_pd") = -1.0)
      .def_static("identity", &MetricOp::identity_metric, py::arg("dim"));

  py::class_<MeasurementOutcome>(m, "MeasurementOutcome")
      .def_readonly("expectation", &MeasurementOutcome::expectation)
      .def_property_readonly("probabilities",
                             [](const MeasurementOutcome& o) { return RVec(o.probabilities); })
      .def_property_readonly("basis_labels",
                             [](const MeasurementOutcome& o) { return CVec(o.basis_labels); })
      .def_readonly("context", &MeasurementOutcome::context);

  py::class_<TwoLevel>(m, "TwoLevel")
      .def_property_readonly("h", [](const TwoLevel& t) { return CMat(t.h); })
      .def_readonly("broken", &TwoLevel::broken)
      .def_readonly("omega_gap", &TwoLevel::omega_gap)
      .def_readonly("phi", &TwoLevel::phi)
      .def_readonly("lambda_plus", &TwoLevel::lambda_plus)
      .def_readonly("lambda_minus", &TwoLevel::lambda_minus);

  py::class_<StoneReport>(m, "StoneReport")
      .def_readonly("group_law_defect", &StoneReport::group_law_defect)
      .def_readonly("norm_bound", &StoneReport::norm_bound)
      .def_readonly("max_norm_excess", &StoneReport::max_norm_excess)
      .def_readonly("deltas", &StoneReport::deltas)
      .def_readonly("generator_errors", &StoneReport::generator_errors)
      .def_readonly("recovery_rate", &StoneReport::recovery_rate);

  py::class_<Propagator, std::shared_ptr<Propagator>>(m, "Propagator")
      .def_readonly("grid", &Propagator::grid)
      .def_readonly("order", &Propagator::order)
      .def_readonly("dim", &Propagator::dim)
      .def("fwd", &Propagator::fwd, py::arg("t"), "U(t, 0)")
      .def("bwd", &Propagator::bwd, py::arg("t"), "U(0, t)")
      .def("between", &Propagator::between, py::arg("t"), py::arg("s"), "U(t, s)");

  py::class_<BrachistochroneResult>(m, "BrachistochroneResult")
      .def_readonly("r", &BrachistochroneResult::r)
      .def_readonly("theta", &BrachistochroneResult::theta)
      .def_readonly("gamma", &BrachistochroneResult::gamma)
      .def_readonly("omega", &BrachistochroneResult::omega)
      .def_readonly("phi", &BrachistochroneResult::phi)
      .def_readonly("t_transfer", &BrachistochroneResult::t_transfer)
      .def_readonly("t_simulated", &BrachistochroneResult::t_simulated)
      .def_readonly("hermitian_bound", &BrachistochroneResult::hermitian_bound);

  py::class_<Decomposition>(m, "Decomposition")
      .def_static("from_frame", &Decomposition::from_frame)
      .def_static("standard", &Decomposition::standard)
      .def_property_readonly("frame", [](const Decomposition& d) { return CMat(d.frame); })
      .def_property_readonly("dual_frame",
                             [](const Decomposition& d) { return CMat(d.dual_frame); })
      .def_readonly("projectors", &Decomposition::projectors);

  py::class_<CyclicEvolution>(m, "CyclicEvolution")
      .def_readonly("tau", &CyclicEvolution::tau)
      .def_property_readonly("theta", [](const CyclicEvolution& c) { return CVec(c.theta); })
      .def_readonly("windings", &CyclicEvolution::windings)
      .def_readonly("cycle_defect", &CyclicEvolution::cycle_defect)
      .def_property_readonly("x0_system",
                             [](const CyclicEvolution& c) { return c.x0_system; });

  py::class_<PhaseReport>(m, "PhaseReport")
      .def_readonly("tau", &PhaseReport::tau)
      .def_property_readonly("theta", [](const PhaseReport& r) { return CVec(r.theta); })
      .def_property_readonly("dynamical", [](const PhaseReport& r) { return CVec(r.dynamical); })
      .def_property_readonly("beta", [](const PhaseReport& r) { return CVec(r.beta); })
      .def_property_readonly("holonomy_diag",
                             [](const PhaseReport& r) { return CVec(r.holonomy_diag); })
      .def_readonly("branch_windings", &PhaseReport::branch_windings);

  py::class_<InvarianceReport>(m, "InvarianceReport")
      .def_readonly("trials", &InvarianceReport::trials)
      .def_readonly("reparam_deviation", &InvarianceReport::reparam_deviation)
      .def_readonly("gauge_deviation", &InvarianceReport::gauge_deviation)
      .def_readonly("measurement_deviation", &InvarianceReport::measurement_deviation)
      .def_readonly("canonical_new_o0_deviation",
                    &InvarianceReport::canonical_new_o0_deviation);

  py::class_<PhaseAnalysis>(m, "PhaseAnalysis")
      .def_readonly("cycle", &PhaseAnalysis::cycle)
      .def_readonly("report", &PhaseAnalysis::report);

  // linear-algebra kernel
  m.def("eig_general", &eig_general, py::arg("a"), py::arg("tol") = 1e-10,
        py::arg("kappa_max") = kKappaMax);
  m.def("dual_basis", &dual_basis, py::arg("right"), py::arg("cond_limit") = 1e14);
  m.def("herm_eig", &herm_eig, py::arg("hm"), py::arg("tol_herm") = 1e-10);
  m.def("herm_sqrt", &herm_sqrt, py::arg("g"), py::arg("tol_pd") = -1.0);
  m.def("mat_exp", py::overload_cast<const CMat&, Complex>(&mat_exp), py::arg("a"),
        py::arg("z") = Complex(1, 0));
  m.def("mat_exp_spectral", py::overload_cast<const EigSystem&, Complex>(&mat_exp),
        py::arg("sys"), py::arg("z") = Complex(1, 0));
  m.def("kron", &kron, py::arg("a"), py::arg("b"), py::arg("cap") = kKronCap);

  // operator classification and builders
  m.def("classify", [](const CMat& t, double tol) { return classification_dict(classify(t, tol)); },
        py::arg("t"), py::arg("tol") = 1e-8);
  m.def("classify_evolution",
        [](const CMat& u, double tol) { return classification_dict(classify_evolution(u, tol)); },
        py::arg("u"), py::arg("tol") = 1e-8);
  m.def("metric_from_eigensystem", &metric_from_eigensystem, py::arg("sys"));
  m.def("hermitianize", &hermitianize, py::arg("t"), py::arg("g"));
  m.def("is_metric_for", &is_metric_for, py::arg("g"), py::arg("t"), py::arg("tol") = 1e-10);
  m.def("is_pseudo_hermitian", &is_pseudo_hermitian, py::arg("t"), py::arg("eta"),
        py::arg("tol") = 1e-10);
  m.def("func_calc", &func_calc, py::arg("sys"), py::arg("f"));
  m.def("para_hermitian_eigensystem", &para_hermitian_eigensystem, py::arg("t"),
        py::arg("tol") = 1e-8);
  m.def("deformed_pauli", [](double omega) {
    auto tri = deformed_pauli(omega);
    return py::make_tuple(tri[0], tri[1], tri[2]);
  }, py::arg("omega"));
  m.def("two_level_hamiltonian", &two_level_hamiltonian, py::arg("r"), py::arg("theta"),
        py::arg("gamma"));

  // measurement layer
  m.def("expect", &expect, py::arg("a"), py::arg("g"), py::arg("psi"));
  m.def("expect_naive", &expect_naive, py::arg("a"), py::arg("psi"));
  m.def("expect_discrete", &expect_discrete, py::arg("sys"), py::arg("psi"));
  m.def("biorthogonal_expect", &biorthogonal_expect, py::arg("t"), py::arg("sys"),
        py::arg("psi"));
  m.def("hermitian_consistency", &hermitian_consistency, py::arg("a"), py::arg("g"),
        py::arg("psi"), py::arg("tol"));

  // evolution
  m.def("group", py::overload_cast<const CMat&, double>(&group), py::arg("h"), py::arg("t"));
  m.def("stone_check", &stone_check, py::arg("h"), py::arg("times"), py::arg("tol") = 1e-8);
  m.def("make_propagator",
        [](const std::function<CMat(double)>& h, double t_final, int steps, int order) {
          return std::make_shared<Propagator>(make_propagator(h, t_final, steps, order));
        },
        py::arg("h"), py::arg("t_final"), py::arg("steps"), py::arg("order") = 2);
  m.def("evolve_state", &evolve_state, py::arg("p"), py::arg("psi0"));
  m.def("brachistochrone", &brachistochrone, py::arg("r"), py::arg("theta"), py::arg("gamma"),
        py::arg("steps_per_unit") = 1000);

  // observable-geometric phases
  m.def("heisenberg_evolve", &heisenberg_evolve, py::arg("x0"), py::arg("p"));
  m.def("detect_cycle",
        [](const std::vector<CMat>& traj, std::shared_ptr<Propagator> p, double tol) {
          return detect_cycle(traj, p, tol);
        },
        py::arg("x_traj"), py::arg("p"), py::arg("tol"));
  m.def("geometric_phases", &geometric_phases, py::arg("cycle"), py::arg("h"));
  m.def("geometric_phases_loop", &geometric_phases_loop, py::arg("cycle"), py::arg("alpha"));
  m.def("hausdorff_distance", &hausdorff_distance, py::arg("o1"), py::arg("o2"));
  m.def("canonical_connection", &canonical_connection, py::arg("p"), py::arg("q"),
        py::arg("o0"));
  m.def("horizontal_lift",
        [](std::shared_ptr<Propagator> p, const Decomposition& o0, const CMat& v0,
           const std::vector<double>& ts) { return horizontal_lift(*p, o0, v0, ts); },
        py::arg("p"), py::arg("o0"), py::arg("v0"), py::arg("ts"));
  m.def("holonomy", &holonomy, py::arg("lift"), py::arg("cycle"), py::arg("o0"), py::arg("v0"),
        py::arg("tol") = 1e-6);
  m.def("holonomy_phases", &holonomy_phases, py::arg("hol"), py::arg("v0"), py::arg("o0"));
  m.def("uniform_times", &uniform_times, py::arg("t_end"), py::arg("samples"));
  m.def("analyze_phases", &analyze_phases, py::arg("h"), py::arg("x0"), py::arg("horizon"),
        py::arg("steps"), py::arg("order") = 2, py::arg("detect_tol") = 1e-4);
  m.def("invariance_suite", &invariance_suite, py::arg("cycle"), py::arg("h"),
        py::arg("trials"), py::arg("seed") = 1234);
}
