#include "afpp/bifurcation.hpp"
#include "afpp/checks.hpp"
#include "afpp/equilibria.hpp"
#include "afpp/error.hpp"
#include "afpp/global_dynamics.hpp"
#include "afpp/model.hpp"
#include "afpp/optimal_control.hpp"
#include "afpp/simulation.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace afpp;

namespace {

py::array_t<double> column(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict equilibrium_dict(const Equilibrium& e) {
  py::dict d;
  d["kind"] = std::string(to_string(e.kind));
  d["x"] = e.location.x;
  d["y"] = e.location.y;
  d["eigenvalues"] = std::vector<std::complex<double>>(e.eigenvalues.begin(), e.eigenvalues.end());
  d["stability"] = std::string(to_string(e.stability));
  d["phi"] = py::make_tuple(e.flags.phi1, e.flags.phi2, e.flags.phi3);
  return d;
}

py::dict critical_dict(const CriticalXi& c) {
  py::dict d;
  d["xi_star"] = c.xi_star;
  d["bracket"] = py::make_tuple(c.bracket_lo, c.bracket_hi);
  d["x"] = c.location.x;
  d["y"] = c.location.y;
  d["eigenvalues"] = std::vector<std::complex<double>>(c.eigenvalues.begin(), c.eigenvalues.end());
  return d;
}

py::dict trajectory_dict(const Trajectory& tr) {
  std::vector<double> xs, ys;
  for (const auto& s : tr.states) {
    xs.push_back(s.x);
    ys.push_back(s.y);
  }
  py::dict d;
  d["t"] = column(tr.times);
  d["x"] = column(xs);
  d["y"] = column(ys);
  d["truncated"] = tr.truncated;
  d["rejected_steps"] = tr.rejected_steps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Additional-food predator-prey model";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double gamma, double alpha, double xi, double epsilon, double mm, double delta) {
             return ModelParams{gamma, alpha, xi, epsilon, mm, delta};
           }),
           py::arg("gamma") = 1.0, py::arg("alpha") = 1.0, py::arg("xi") = 1.0, py::arg("epsilon") = 1.0,
           py::arg("m") = 1.0, py::arg("delta") = 2.0)
      .def_readwrite("gamma", &ModelParams::gamma)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("xi", &ModelParams::xi)
      .def_readwrite("epsilon", &ModelParams::epsilon)
      .def_readwrite("m", &ModelParams::m)
      .def_readwrite("delta", &ModelParams::delta)
      .def("validate", [](const ModelParams& p, bool allow) { p.validate({allow}); },
           py::arg("allow_delta_le_m") = false)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(gamma=" + std::to_string(p.gamma) + ", alpha=" + std::to_string(p.alpha) +
               ", xi=" + std::to_string(p.xi) + ", epsilon=" + std::to_string(p.epsilon) +
               ", m=" + std::to_string(p.m) + ", delta=" + std::to_string(p.delta) + ")";
      });

  m.def("rhs", [](const ModelParams& p, double x, double y) {
    const auto d = rhs(p, {x, y});
    return py::make_tuple(d.dx, d.dy);
  });
  m.def("jacobian", [](const ModelParams& p, double x, double y) { return Eigen::Matrix2d(jacobian(p, {x, y})); });
  m.def("prey_nullcline_y", &prey_nullcline_y);
  m.def("predator_nullcline_y", &predator_nullcline_y);
  m.def("interior_quintic", [](const ModelParams& p) {
    const auto q = interior_quintic(p);
    return std::vector<double>(q.c.begin(), q.c.end());
  }, "Coefficients, constant term first.");

  m.def("equilibria", [](const ModelParams& p) {
    py::list out;
    for (const auto& e : find_all_equilibria(p)) out.append(equilibrium_dict(e));
    return out;
  });

  m.def("integrate", [](const ModelParams& p, double x0, double y0, double t_end, double rtol, double atol) {
    SimulationOptions o;
    o.stepper.rtol = rtol;
    o.stepper.atol = atol;
    Trajectory tr;
    {
      py::gil_scoped_release release;
      tr = integrate(p, {x0, y0}, t_end, o);
    }
    return trajectory_dict(tr);
  }, py::arg("params"), py::arg("x0"), py::arg("y0"), py::arg("t_end"), py::arg("rtol") = 1e-8,
        py::arg("atol") = 1e-10);

  m.def("transcritical_xi", [](const ModelParams& p) { return critical_dict(transcritical_xi_critical(p)); });
  m.def("saddlenode_xi", [](const ModelParams& p) { return critical_dict(saddlenode_xi_critical(p)); });

  m.def("continuation", [](const ModelParams& p, const std::string& param, double lo, double hi) {
    std::vector<ContinuationResult> branches;
    {
      py::gil_scoped_release release;
      branches = continue_all_branches(p, param_from_string(param), {lo, hi});
    }
    py::list out;
    for (const auto& b : branches) {
      std::vector<double> v, xs, ys;
      for (const auto& pt : b.points) {
        v.push_back(pt.param_value);
        xs.push_back(pt.equilibrium.location.x);
        ys.push_back(pt.equilibrium.location.y);
      }
      py::list events;
      for (const auto& e : b.events) {
        py::dict ev;
        ev["kind"] = std::string(to_string(e.kind));
        ev["value"] = e.param_value;
        ev["x"] = e.location.x;
        ev["y"] = e.location.y;
        events.append(ev);
      }
      py::dict d;
      d["param"] = column(v);
      d["x"] = column(xs);
      d["y"] = column(ys);
      d["events"] = events;
      d["truncated"] = b.truncated;
      out.append(d);
    }
    return out;
  });

  m.def("resultant_folds", [](const ModelParams& p, const std::string& param, double lo, double hi) {
    std::vector<std::pair<double, double>> out;
    for (const auto& f : checks::resultant_folds(p, param_from_string(param), lo, hi)) out.emplace_back(f.value, f.x);
    return out;
  });

  m.def("base_region", [](const ModelParams& p) { return std::string(to_string(classify_base_region(p))); });

  m.def("solve_control", [](const ModelParams& p, const std::string& control, std::pair<double, double> bounds,
                            std::pair<double, double> initial, std::pair<double, double> target, int mesh_size) {
    control::ControlProblem prob;
    prob.params = p;
    prob.control = control::control_kind_from_string(control);
    prob.u_min = bounds.first;
    prob.u_max = bounds.second;
    prob.initial = {initial.first, initial.second};
    prob.target = {target.first, target.second};
    prob.mesh_size = mesh_size;
    prob.validate();
    control::ControlSolution sol;
    control::PmpReport pmp;
    {
      py::gil_scoped_release release;
      sol = control::solve(prob);
      pmp = control::verify_pmp(sol, prob);
    }
    std::vector<double> xs, ys;
    for (const auto& s : sol.states) {
      xs.push_back(s.x);
      ys.push_back(s.y);
    }
    py::dict d;
    d["T_opt"] = sol.T_opt;
    d["S_opt"] = sol.S_opt;
    d["status"] = sol.nlp_stats.status;
    d["t"] = column(sol.t_grid);
    d["x"] = column(xs);
    d["y"] = column(ys);
    d["u"] = column(sol.controls);
    d["switching_times"] = sol.switching_times_t;
    d["pmp_fraction"] = pmp.fraction;
    return d;
  }, py::arg("params"), py::arg("control"), py::arg("bounds"), py::arg("initial"), py::arg("target"),
        py::arg("mesh_size") = 40);

  m.def("run_checks", [](std::uint64_t seed) {
    std::vector<checks::SuiteResult> suites;
    {
      py::gil_scoped_release release;
      suites = checks::run_all(seed);
    }
    py::dict out;
    for (const auto& s : suites) out[py::str(s.name)] = py::make_tuple(s.passed(), s.worst, s.failures);
    return out;
  }, py::arg("seed") = 42);
}
