#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mispar/errors.hpp"
#include "mispar/lasso.hpp"
#include "mispar/model.hpp"
#include "mispar/ridge.hpp"
#include "mispar/simulator.hpp"
#include "mispar/sweep.hpp"

namespace py = pybind11;
using namespace mispar;

namespace {

ModelConfig make_config(double alpha, double mu, double rho, double sigma, double lambda) {
  ModelConfig c{alpha, mu, rho, sigma, lambda};
  c.validate();
  return c;
}

py::dict l1_dict(const lasso::L1Solution& s) {
  py::dict d;
  d["te"] = s.risk.te;
  d["ge"] = s.risk.ge;
  d["tau"] = s.state.tau;
  d["rho_hat"] = s.state.rho_hat;
  d["sigma_xi"] = s.state.sigma_xi;
  d["branch"] = lasso::to_string(s.state.branch);
  return d;
}

}  // namespace

PYBIND11_MODULE(_mispar, m) {
  m.doc() = "Theoretical and simulated risk for misparametrized sparse regression";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NoWindow>(m, "NoWindow", base.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
  py::register_exception<UsageError>(m, "UsageError", base.ptr());

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init(&make_config), py::arg("alpha") = 1.0, py::arg("mu") = 1.0,
           py::arg("rho") = 0.0, py::arg("sigma") = 0.0, py::arg("lam") = 0.0)
      .def_readwrite("alpha", &ModelConfig::alpha)
      .def_readwrite("mu", &ModelConfig::mu)
      .def_readwrite("rho", &ModelConfig::rho)
      .def_readwrite("sigma", &ModelConfig::sigma)
      .def_readwrite("lam", &ModelConfig::lambda)
      .def("__repr__", [](const ModelConfig& c) {
        return "ModelConfig(alpha=" + std::to_string(c.alpha) + ", mu=" + std::to_string(c.mu) +
               ", rho=" + std::to_string(c.rho) + ", sigma=" + std::to_string(c.sigma) +
               ", lam=" + std::to_string(c.lambda) + ")";
      });

  py::class_<RiskPoint>(m, "RiskPoint")
      .def_readonly("te", &RiskPoint::te)
      .def_readonly("ge", &RiskPoint::ge)
      .def("__repr__", [](const RiskPoint& r) {
        return "RiskPoint(te=" + std::to_string(r.te) + ", ge=" + std::to_string(r.ge) + ")";
      });

  m.def("risk_l2", &ridge::risk_l2_any, "l2 risk; lam = 0 is the interpolating limit");
  m.def("risk_l2_oracle", &ridge::risk_l2_oracle, "l2 risk by Marchenko-Pastur quadrature (lam > 0)");
  m.def("risk_l1", [](const ModelConfig& c) { return l1_dict(lasso::solve_l1(c)); },
        "l1 risk and self-consistent state");

  m.def("alpha_c", [](double rho) {
    const auto pb = lasso::alpha_c(rho);
    return py::make_tuple(pb.alpha_c, pb.tau_c);
  }, py::arg("rho"), "(alpha_c, tau_c)");
  m.def("mu_c", [](double rho, double alpha) { return lasso::mu_c(rho, alpha).mu_c; },
        py::arg("rho"), py::arg("alpha"));
  m.def("mu_c_approx", &lasso::mu_c_approx, py::arg("rho"), py::arg("alpha"));
  m.def("recovery_slope", &lasso::recovery_slope, py::arg("rho"), py::arg("alpha"));

  m.def(
      "run_trials",
      [](const ModelConfig& c, int n, int trials, const std::string& penalty, std::uint64_t seed) {
        if (penalty != "l2" && penalty != "l1") throw UsageError("penalty must be 'l2' or 'l1'");
        sim::TrialSummary s;
        {
          py::gil_scoped_release release;
          s = sim::run_trials(c, n, trials, penalty == "l2" ? sim::Penalty::l2 : sim::Penalty::l1,
                              seed);
        }
        py::dict d;
        d["te_mean"] = s.te_mean;
        d["te_stderr"] = s.te_stderr;
        d["ge_mean"] = s.ge_mean;
        d["ge_stderr"] = s.ge_stderr;
        d["failed"] = s.failed;
        return d;
      },
      py::arg("cfg"), py::arg("n"), py::arg("trials"), py::arg("penalty"), py::arg("seed") = 42);

  m.def("parse_grid", &parse_grid);
  m.def(
      "phase_csv",
      [](const std::vector<double>& rho, double alpha) { return phase(rho, alpha).table.to_csv(); },
      py::arg("rho"), py::arg("alpha"));
}
