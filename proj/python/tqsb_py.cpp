#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "tqsb/error.hpp"
#include "tqsb/model.hpp"
#include "tqsb/observables.hpp"
#include "tqsb/oracle_ed.hpp"
#include "tqsb/phase.hpp"
#include "tqsb/spectral.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace tqsb;

namespace {

ModelParams make_params(double delta, double epsilon, double k_ising, double alpha,
                        double s, double omega_c) {
  ModelParams p;
  p.delta = delta;
  p.epsilon = epsilon;
  p.k_ising = k_ising;
  p.alpha = alpha;
  p.s = s;
  p.omega_c = omega_c;
  return p;
}

py::dict state_dict(const AnsatzState& st) {
  return py::dict("eta"_a = st.eta, "v_ind"_a = st.v_ind, "f_stat"_a = st.f_stat, "w"_a = st.w,
                  "u"_a = st.u, "v"_a = st.v, "gap"_a = st.gap, "sigma_cap"_a = st.sigma_cap,
                  "theta"_a = st.theta, "sigma0"_a = st.sigma0, "eps_prime"_a = st.eps_prime);
}

py::dict fit_dict(const ExponentFit& f) {
  return py::dict("value"_a = f.value, "intercept"_a = f.intercept,
                  "r_squared"_a = f.r_squared, "window"_a = f.window,
                  "n_points"_a = f.n_points, "accepted"_a = f.accepted());
}

DiscreteBath to_bath(const std::vector<std::pair<double, double>>& modes) {
  DiscreteBath b;
  for (const auto& [g, w] : modes) b.modes.push_back({g, w});
  return b;
}

std::vector<std::pair<double, double>> from_bath(const DiscreteBath& b) {
  std::vector<std::pair<double, double>> out;
  for (const auto& m : b.modes) out.emplace_back(m.g, m.omega);
  return out;
}

}  // namespace

PYBIND11_MODULE(tqsb, m) {
  m.doc() = "Variational ground state of two qubits coupled to a common bosonic bath";

  // Error subclasses ValueError and carries the failure code as `code`.
  static PyObject* error_type =
      PyErr_NewException("tqsb.Error", PyExc_ValueError, nullptr);
  m.attr("Error") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object value = py::reinterpret_steal<py::object>(
          PyObject_CallFunction(error_type, "s", e.what()));
      value.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, value.ptr());
    }
  });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init(&make_params), "delta"_a = 0.1, "epsilon"_a = 0.0, "k_ising"_a = 0.0,
           "alpha"_a = 0.0, "s"_a = 1.0, "omega_c"_a = 1.0)
      .def_readwrite("delta", &ModelParams::delta)
      .def_readwrite("epsilon", &ModelParams::epsilon)
      .def_readwrite("k_ising", &ModelParams::k_ising)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("s", &ModelParams::s)
      .def_readwrite("omega_c", &ModelParams::omega_c)
      .def("__eq__", [](const ModelParams& a, const ModelParams& b) { return a == b; })
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(delta=" + std::to_string(p.delta) +
               ", epsilon=" + std::to_string(p.epsilon) +
               ", k_ising=" + std::to_string(p.k_ising) + ", alpha=" + std::to_string(p.alpha) +
               ", s=" + std::to_string(p.s) + ")";
      });

  m.def("validate", [](const ModelParams& p) { return validate(p); }, "params"_a,
        "Checks the parameters and rescales them to omega_c = 1.");

  m.def("spectral_density",
        [](double alpha, double s, double omega) {
          return spectral_density(BathSpec(ContinuumBath{alpha, s, 1.0}), omega);
        },
        "alpha"_a, "s"_a, "omega"_a);

  m.def("bath_functionals",
        [](double alpha, double s, double sigma_cap) {
          const auto b = bath_functionals(BathSpec(ContinuumBath{alpha, s, 1.0}), sigma_cap);
          return py::make_tuple(b.eta, b.v_ind, b.f_stat);
        },
        "alpha"_a, "s"_a, "sigma_cap"_a, "(eta, V, F) of a continuum bath at gap Sigma.");

  m.def("log_discretize",
        [](double alpha, double s, double lam, int n) {
          return from_bath(log_discretize(ContinuumBath{alpha, s, 1.0}, lam, n));
        },
        "alpha"_a, "s"_a, "lam"_a = 2.0, "n_modes"_a = 4,
        "List of (g, omega) modes from logarithmic bins.");

  m.def("ground_state",
        [](const ModelParams& params, bool with_chi) {
          const ModelParams p = validate(params);
          GroundStateReport r;
          {
            py::gil_scoped_release release;
            r = ground_state(p, SpectralEvaluator(continuum_bath(p)), {}, with_chi);
          }
          py::dict d("e_g"_a = r.e_g, "sx"_a = r.sx, "sz"_a = r.sz, "entropy"_a = r.entropy,
                     "c12"_a = r.c12, "rho"_a = r.rho.m,
                     "branch"_a = std::string(to_string(r.branch)),
                     "valid"_a = r.validity.all(), "state"_a = state_dict(r.state));
          d["chi"] = r.chi ? py::cast(*r.chi) : py::none();
          return d;
        },
        "params"_a, "with_chi"_a = false,
        "Solve the self-consistency and evaluate every observable.");

  m.def("criterion",
        [](const ModelParams& params) { return criterion(validate(params)); }, "params"_a,
        "1 - 4u^2 F / (W - V + K) on the unbiased solution; negative when localized.");

  m.def("find_alpha_c",
        [](double delta, double k_ising, double s) {
          CriticalPoint cp;
          {
            py::gil_scoped_release release;
            cp = find_alpha_c(delta, k_ising, s);
          }
          return py::dict("alpha_c"_a = cp.alpha_c, "bracket"_a = cp.bracket,
                          "residual"_a = cp.criterion_residual, "asymptotic"_a = cp.asymptotic);
        },
        "delta"_a, "k_ising"_a = 0.0, "s"_a = 1.0);

  m.def("alpha_c_scaling_limit", [](double s) {
    const auto r = alpha_c_scaling_limit(s);
    return py::make_tuple(r.alpha_c, r.always_delocalized);
  }, "s"_a);

  m.def("fit_exponent",
        [](const std::vector<double>& xs, const std::vector<double>& ys) {
          return fit_dict(fit_exponent(xs, ys));
        },
        "xs"_a, "ys"_a, "Slope of log10 y against log10 x.");

  m.def("exponent_suite",
        [](double s, double delta, double k_ising) {
          ExponentSuite e;
          {
            py::gil_scoped_release release;
            e = exponent_suite(s, delta, k_ising);
          }
          return py::dict("alpha_c"_a = e.alpha_c, "delta_c"_a = e.delta_c, "k_c"_a = e.k_c,
                          "delta"_a = fit_dict(e.delta_exp), "gamma"_a = fit_dict(e.gamma),
                          "beta"_a = fit_dict(e.beta), "beta_prime"_a = fit_dict(e.beta_prime),
                          "zeta"_a = fit_dict(e.zeta));
        },
        "s"_a, "delta"_a = 0.1, "k_ising"_a = 0.0);

  m.def("exact_ground",
        [](const ModelParams& params, const std::vector<std::pair<double, double>>& modes,
           int n_max) {
          const ModelParams p = validate(params);
          const DiscreteBath bath = to_bath(modes);
          EdResult r;
          {
            py::gil_scoped_release release;
            r = exact_ground(p, bath, {n_max, {}});
          }
          return py::dict("energy"_a = r.energy, "sz"_a = r.sz, "sx"_a = r.sx,
                          "residual"_a = r.residual, "dimension"_a = r.dimension);
        },
        "params"_a, "modes"_a, "n_max"_a = 4,
        "Exact ground state for a discrete bath given as (g, omega) pairs.");

  m.def("ansatz_energy",
        [](const ModelParams& params, const std::vector<std::pair<double, double>>& modes) {
          const ModelParams p = validate(params);
          return ground_energy(solve(p, BathSpec(to_bath(modes))).state, p);
        },
        "params"_a, "modes"_a, "Variational energy for the same discrete bath.");
}
