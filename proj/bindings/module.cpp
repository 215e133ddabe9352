// Python bindings for the graspsim core: dynamics, control laws, stability
// analysis and the closed-loop simulator.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graspsim/analysis.hpp"
#include "graspsim/checks.hpp"
#include "graspsim/scenario.hpp"

namespace py = pybind11;
using namespace graspsim;

PYBIND11_MODULE(graspsim, m) {
  m.doc() = "Planar manipulator tracking control: dynamics, computed-torque "
            "laws, stability analysis and closed-loop simulation";

  py::register_exception<InvalidInputError>(m, "InvalidInputError",
                                            PyExc_ValueError);
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError",
                                              PyExc_ArithmeticError);
  static py::exception<DivergenceError> div_exc(m, "DivergenceError",
                                                PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DivergenceError& e) {
      div_exc(e.what());
    }
  });
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError",
                                            PyExc_ValueError);

  py::class_<LinkParams>(m, "LinkParams")
      .def(py::init<double, double, double, double>(), py::arg("mass"),
           py::arg("length"), py::arg("com_distance"), py::arg("inertia_zz"))
      .def_readwrite("mass", &LinkParams::mass)
      .def_readwrite("length", &LinkParams::length)
      .def_readwrite("com_distance", &LinkParams::com_distance)
      .def_readwrite("inertia_zz", &LinkParams::inertia_zz);

  py::class_<ManipulatorModel>(m, "ManipulatorModel")
      .def(py::init<>())
      .def_readwrite("links", &ManipulatorModel::links)
      .def_readwrite("gravity", &ManipulatorModel::gravity)
      .def_readonly("alpha1", &ManipulatorModel::alpha1)
      .def_readonly("alpha2", &ManipulatorModel::alpha2)
      .def_property_readonly("n", &ManipulatorModel::n);

  m.def("stock_two_link", &stock_two_link,
        "Stock planar two-link arm used by the built-in scenarios");
  m.def("mass_matrix", &mass_matrix, py::arg("model"), py::arg("q"));
  m.def("coriolis_matrix", &coriolis_matrix, py::arg("model"), py::arg("q"),
        py::arg("qdot"));
  m.def("gravity_vector", &gravity_vector, py::arg("model"), py::arg("q"));
  m.def("inverse_dynamics", &inverse_dynamics, py::arg("model"), py::arg("q"),
        py::arg("qdot"), py::arg("qddot"));
  m.def("forward_dynamics", &forward_dynamics, py::arg("model"), py::arg("q"),
        py::arg("qdot"), py::arg("u"), py::arg("d"));
  m.def("regressor", &regressor, py::arg("model"), py::arg("q"),
        py::arg("qdot"), py::arg("qddot"));
  m.def(
      "base_parameters",
      [](const ManipulatorModel& model) {
        return base_parameters(model).theta;
      },
      py::arg("model"));
  m.def(
      "forward_kinematics",
      [](const ManipulatorModel& model, const JointVector& q) {
        return forward_kinematics(model, q);
      },
      py::arg("model"), py::arg("q"));
  m.def("kinetic_energy", &kinetic_energy, py::arg("model"), py::arg("q"),
        py::arg("qdot"));
  m.def("potential_energy", &potential_energy, py::arg("model"), py::arg("q"));

  py::class_<GainSet>(m, "GainSet")
      .def_readwrite("kp", &GainSet::kp)
      .def_readwrite("kd", &GainSet::kd)
      .def_readwrite("ki", &GainSet::ki);
  m.def("uniform_gains", &uniform_gains, py::arg("n"), py::arg("kp"),
        py::arg("kd"), py::arg("ki"));

  py::class_<StabilityVerdict>(m, "StabilityVerdict")
      .def_readonly("stable", &StabilityVerdict::stable)
      .def_readonly("margin", &StabilityVerdict::margin)
      .def_readonly("condition_values", &StabilityVerdict::condition_values);
  m.def("routh_stability", &routh_stability, py::arg("kd"), py::arg("kp"),
        py::arg("ki"));
  m.def(
      "poles",
      [](double kd, double kp, double ki) {
        const auto r = poles(ErrorTransfer{kd, kp, ki});
        return std::vector<std::complex<double>>(r.begin(), r.end());
      },
      py::arg("kd"), py::arg("kp"), py::arg("ki"));
  m.def(
      "final_value",
      [](double kd, double kp, double ki, double delta) {
        return final_value(ErrorTransfer{kd, kp, ki}, delta);
      },
      py::arg("kd"), py::arg("kp"), py::arg("ki"), py::arg("delta"));
  m.def(
      "linear_error_response",
      [](double kd, double kp, double ki, double delta, double t_end,
         double dt) {
        return linear_error_response(ErrorTransfer{kd, kp, ki}, delta, t_end,
                                     dt);
      },
      py::arg("kd"), py::arg("kp"), py::arg("ki"), py::arg("delta"),
      py::arg("t_end"), py::arg("dt"));

  py::class_<Metrics>(m, "Metrics")
      .def_readonly("rms_error_tail", &Metrics::rms_error_tail)
      .def_readonly("settling_time", &Metrics::settling_time)
      .def_readonly("control_energy", &Metrics::control_energy);

  py::class_<SimResult>(m, "SimResult")
      .def_property_readonly(
          "t",
          [](const SimResult& r) {
            return Eigen::Map<const Eigen::VectorXd>(
                r.t.data(), static_cast<long>(r.t.size()))
                .eval();
          })
      .def_property_readonly(
          "q", [](const SimResult& r) { return as_matrix(r.q); })
      .def_property_readonly(
          "q_d", [](const SimResult& r) { return as_matrix(r.q_d); })
      .def_property_readonly(
          "error", [](const SimResult& r) { return as_matrix(r.error); })
      .def_property_readonly(
          "u", [](const SimResult& r) { return as_matrix(r.u); })
      .def_property_readonly(
          "d", [](const SimResult& r) { return as_matrix(r.d); })
      .def_readonly("metrics", &SimResult::metrics);

  m.def(
      "simulate_preset",
      [](const std::string& id, double dt, double duration) {
        auto sc = preset(id);
        if (!sc) throw InvalidInputError("unknown preset '" + id + "'");
        if (dt > 0) sc->sim.dt = dt;
        if (duration > 0) sc->sim.duration = duration;
        return simulate(sc->model, sc->controller, sc->trajectory,
                        sc->disturbance, sc->sim);
      },
      py::arg("id"), py::arg("dt") = 0.0, py::arg("duration") = 0.0,
      "Run a built-in scenario (fig6, fig7, fig8); dt/duration <= 0 keep "
      "the preset values");

  m.def(
      "simulate_tracking",
      [](const ManipulatorModel& model, double kp, double kd, double ki,
         const Eigen::VectorXd& d, double dt, double duration) {
        ControllerSpec controller;
        controller.kind =
            ki == 0.0 ? ControllerKind::pd : ControllerKind::id_integral;
        controller.gains = uniform_gains(model.n(), kp, kd, ki);
        SimConfig config;
        config.dt = dt;
        config.duration = duration;
        const DisturbanceSpec dist = d.size() == 0
                                         ? DisturbanceSpec::zero(model.n())
                                         : DisturbanceSpec::constant(d);
        return simulate(model, controller, stock_trajectory(), dist, config);
      },
      py::arg("model"), py::arg("kp"), py::arg("kd"), py::arg("ki"),
      py::arg("d") = Eigen::VectorXd(), py::arg("dt") = 1e-3,
      py::arg("duration") = 60.0,
      "Closed-loop run on the stock reference trajectory with uniform gains "
      "and an optional constant disturbance");

  m.def(
      "run_checks",
      []() {
        std::vector<std::tuple<std::string, bool, double, double>> out;
        for (const CheckResult& r : run_all_checks())
          out.emplace_back(r.name, r.pass, r.observed, r.threshold);
        return out;
      },
      "Run the library self-check suite; returns (name, pass, observed, "
      "threshold) tuples");
}
