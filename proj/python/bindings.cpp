#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <stdexcept>

#include "torus_wave/energy.hpp"
#include "torus_wave/error.hpp"
#include "torus_wave/estimates.hpp"
#include "torus_wave/scenario.hpp"
#include "torus_wave/source.hpp"
#include "torus_wave/torus_field.hpp"

namespace py = pybind11;
using namespace tw;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

int cube_side(const py::buffer_info& info) {
  if (info.ndim != 3 || info.shape[0] != info.shape[1] || info.shape[1] != info.shape[2])
    throw std::invalid_argument("expected an (n, n, n) array");
  return static_cast<int>(info.shape[0]);
}

Field to_field(const RealArray& a) {
  const py::buffer_info info = a.request();
  const GridSpec g(cube_side(info));
  const auto* p = static_cast<const double*>(info.ptr);
  return Field(g, std::vector<double>(p, p + g.size()));
}

template <typename T>
py::array_t<T> to_array(const GridSpec& g, const std::vector<T>& v) {
  py::array_t<T> out({g.n(), g.n(), g.n()});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict outcome_dict(const RunOutcome& r) {
  py::list checks;
  for (const CheckResult& c : r.report.results) {
    py::dict d;
    d["id"] = c.check_id;
    d["passed"] = c.passed;
    d["skipped"] = c.skipped;
    d["worst_margin"] = c.worst_margin;
    d["worst_time"] = c.worst_time;
    d["tolerance"] = c.tolerance_used;
    d["note"] = c.note;
    checks.append(d);
  }
  std::vector<double> t, em_sq, u_hm;
  for (const EnergySample& s : r.trajectory.samples) {
    t.push_back(s.t);
    em_sq.push_back(s.e_m_sq);
    u_hm.push_back(s.u_hm);
  }
  py::dict out;
  out["exit_code"] = r.exit_code;
  out["message"] = r.message;
  out["checks"] = checks;
  out["t"] = py::array_t<double>(t.size(), t.data());
  out["Em_sq"] = py::array_t<double>(em_sq.size(), em_sq.data());
  out["u_Hm"] = py::array_t<double>(u_hm.size(), u_hm.data());
  out["t_max_empirical"] = r.report.t_max_empirical;
  out["c0_estimate"] = r.report.c0_estimate;
  return out;
}

Overrides make_overrides(std::optional<std::uint64_t> seed, std::optional<double> dt) {
  Overrides o;
  o.seed = seed;
  o.dt = dt;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Spectral fields, energies and scenario runs for the damped wave equation on the 3-torus.";

  py::register_exception<ParameterError>(mod, "ParameterError", PyExc_ValueError);
  py::register_exception<DomainError>(mod, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_RuntimeError);

  mod.def("transform", [](const RealArray& u) {
    const Spectrum s = transform(to_field(u));
    return to_array(s.grid, s.coeffs);
  }, "Fourier coefficients c_n = FFT(u) / n^3, in FFT index order.");
  mod.def("inverse_transform", [](const ComplexArray& c) {
    const py::buffer_info info = c.request();
    Spectrum s{GridSpec(cube_side(info))};
    const auto* p = static_cast<const Complex*>(info.ptr);
    std::copy(p, p + s.grid.size(), s.coeffs.begin());
    const Field f = inverse_transform(s);
    return to_array(f.grid, f.values);
  });

  mod.def("sobolev_norm", [](const RealArray& u, int m) { return sobolev_norm(to_field(u), m); },
          py::arg("u"), py::arg("m"));
  mod.def("l2_norm", [](const RealArray& u) { return l2_norm(to_field(u)); });
  mod.def("sup_norm", [](const RealArray& u) { return sup_norm(to_field(u)); });

  mod.def("modified_energy", [](const RealArray& u, const RealArray& ut, double omega, int m) {
    return modified_energy(to_field(u), to_field(ut), omega, m);
  }, py::arg("u"), py::arg("ut"), py::arg("omega"), py::arg("m"), "Squared modified energy E_m^2.");
  mod.def("standard_energy", [](const RealArray& u, const RealArray& ut, int m) {
    return standard_energy(to_field(u), to_field(ut), m);
  }, py::arg("u"), py::arg("ut"), py::arg("m"), "Squared standard wave energy.");

  mod.def("derive_exponents", [](double k_eos, double omega) {
    const Exponents e = derive_exponents(k_eos, omega);
    return py::make_tuple(e.kappa, e.mu);
  }, py::arg("k_eos"), py::arg("omega"), "(kappa, mu) for the fluid equation of state p = K rho.");

  mod.def("h_threshold", &h_threshold, py::arg("omega"), py::arg("t1"));
  mod.def("g_function", &g_function, py::arg("t"), py::arg("omega"), py::arg("eps_prime"));
  mod.def("epsilon_budgets", [](double e_m0, double c_delta, double t1, double eps_prime, double omega) {
    BootstrapParams bp;
    bp.e_m0 = e_m0;
    bp.c_delta = c_delta;
    bp.t1 = t1;
    bp.eps_prime = eps_prime;
    return epsilon_budgets(bp, omega);
  }, py::arg("e_m0"), py::arg("c_delta"), py::arg("t1"), py::arg("eps_prime"), py::arg("omega"));

  mod.def("run_file", [](const std::filesystem::path& config, std::optional<std::filesystem::path> out_dir,
                         std::optional<std::uint64_t> seed, std::optional<double> dt) {
    const ConfigMap c = ConfigMap::load(config);
    RunOutcome r;
    {
      py::gil_scoped_release release;
      r = run_config(c, make_overrides(seed, dt), out_dir);
    }
    return outcome_dict(r);
  }, py::arg("config"), py::arg("out_dir") = py::none(), py::arg("seed") = py::none(), py::arg("dt") = py::none());
  mod.def("run_text", [](const std::string& text, std::optional<std::filesystem::path> out_dir) {
    const ConfigMap c = ConfigMap::parse(text);
    RunOutcome r;
    {
      py::gil_scoped_release release;
      r = run_config(c, {}, out_dir);
    }
    return outcome_dict(r);
  }, py::arg("text"), py::arg("out_dir") = py::none());
}
