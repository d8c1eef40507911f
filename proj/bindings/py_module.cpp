#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ambit/ambit_kernels.hpp"
#include "ambit/config.hpp"
#include "ambit/integrability.hpp"
#include "ambit/pushforward.hpp"
#include "ambit/volmod.hpp"

namespace py = pybind11;
using namespace ambit;

namespace {

measure::JumpMeasureSpec atoms_to_spec(
    const std::vector<std::pair<double, double>>& atoms) {
  measure::JumpMeasureSpec spec;
  for (const auto& [size, mass] : atoms) spec.atoms.push_back({size, mass});
  return spec;
}

py::dict verdict_to_dict(const quad::Verdict& v) {
  py::dict d;
  d["outcome"] = std::string(quad::to_string(v.outcome));
  d["value"] = v.value;
  d["err"] = v.err;
  d["slope"] = v.slope;
  d["reason"] = v.reason;
  return d;
}

}  // namespace

PYBIND11_MODULE(ambitkit, m) {
  m.doc() =
      "Characteristic triplets of space-time random measures: integrability "
      "verdicts, Levy-basis simulation, heat-kernel membership, and "
      "(sup)COGARCH volatility models.";

  m.def(
      "integrate_improper",
      [](const std::function<double(double)>& f, double lo, double hi,
         std::vector<double> singular, double rel_tol, int ladder_rungs) {
        quad::QuadConfig cfg;
        cfg.rel_tol = rel_tol;
        cfg.ladder_rungs = ladder_rungs;
        return verdict_to_dict(quad::integrate_improper(
            f, quad::Axis{lo, hi, std::move(singular)}, cfg));
      },
      py::arg("f"), py::arg("lo"), py::arg("hi"),
      py::arg("singular") = std::vector<double>{}, py::arg("rel_tol") = 1e-6,
      py::arg("ladder_rungs") = 20,
      "Improper 1-d integral with a Finite/Infinite/Inconclusive verdict.");

  m.def(
      "phi_max",
      [](const std::vector<std::pair<double, double>>& atoms, double eta,
         double tol) {
        const auto r = volmod::phi_max(atoms_to_spec(atoms), eta, tol);
        py::dict d;
        d["value"] = r.value;
        d["residual"] = r.residual;
        d["finite"] = r.finite;
        d["diagnostic"] = r.diagnostic;
        return d;
      },
      py::arg("atoms"), py::arg("eta"), py::arg("tol") = 1e-10,
      "Stationarity boundary of the volatility feedback parameter.");

  m.def(
      "heat_lp_verdict",
      [](double p, int d, double t) {
        return verdict_to_dict(kernels::heat_lp_verdict(p, d, t));
      },
      py::arg("p"), py::arg("d"), py::arg("t") = 1.0);

  m.def(
      "heat_green",
      [](double t, double s, std::vector<double> x, std::vector<double> y) {
        return kernels::heat_green(t, s, x, y, static_cast<int>(x.size()));
      },
      py::arg("t"), py::arg("s"), py::arg("x"), py::arg("y"));

  m.def(
      "gaussian_exponent",
      [](double c, double mass, double u) {
        measure::CharacteristicTriplet t;
        t.drift = measure::constant_field(0.0);
        t.gaussian = measure::GaussianPart::orthogonal(measure::constant_field(c));
        t.jumps = [](double, std::span<const double>) {
          return measure::JumpMeasureSpec::zero();
        };
        t.control.time = measure::TimeControl::lebesgue(0.0, mass);
        t.control.space = measure::SpaceControl::single_point();
        return measure::levy_khintchine_exponent(t, measure::Region{0.0, mass, {}},
                                                 u);
      },
      py::arg("c"), py::arg("mass"), py::arg("u"),
      "Levy-Khintchine exponent of a Gaussian-only basis over a region of the "
      "given mass.");

  m.def(
      "check_integrable_toml",
      [](const std::string& triplet_toml, const std::string& integrand_toml,
         const std::string& tau) {
        const auto triplet = io::triplet_from_toml(io::parse_toml(triplet_toml));
        const auto H = io::integrand_from_toml(io::parse_toml(integrand_toml));
        const auto report = integrability::check_integrable(
            H, triplet, tau.empty() ? triplet.tau : io::parse_tau(tau));
        py::dict d;
        d["conjunction"] = std::string(integrability::to_string(report.conjunction));
        d["variant"] = std::string(integrability::to_string(report.variant));
        d["cond1"] = verdict_to_dict(report.cond1);
        d["cond2"] = verdict_to_dict(report.cond2);
        d["cond3"] = verdict_to_dict(report.cond3);
        return d;
      },
      py::arg("triplet_toml"), py::arg("integrand_toml"), py::arg("tau") = "",
      "Integrability report from TOML documents (passed as text).");

  m.def(
      "simulate_cogarch",
      [](double beta, double eta, double phi,
         const std::vector<std::pair<double, double>>& atoms, double horizon,
         std::uint64_t seed, double grid_dt) {
        volmod::CogarchParams params;
        params.beta = beta;
        params.eta = eta;
        params.phi = phi;
        params.driver = atoms_to_spec(atoms);
        const auto path = volmod::simulate_cogarch(params, horizon, seed, grid_dt);
        py::dict d;
        d["t"] = path.t;
        d["V"] = path.V;
        d["G"] = path.G;
        py::list jumps;
        for (const auto& j : path.jump_log) {
          py::dict je;
          je["t"] = j.t;
          je["size"] = j.size;
          je["v_pre"] = j.v_pre;
          je["dv"] = j.dv;
          je["dg"] = j.dg;
          jumps.append(je);
        }
        d["jumps"] = jumps;
        return d;
      },
      py::arg("beta"), py::arg("eta"), py::arg("phi"), py::arg("atoms"),
      py::arg("horizon"), py::arg("seed") = 1, py::arg("grid_dt") = 0.1);

  m.def(
      "classify_colored",
      [](const std::function<double(double, double)>& H,
         const std::function<double(double)>& f, double t0, double t1,
         double space_lo, double space_hi) {
        return std::string(kernels::to_string(kernels::classify_colored_example(
            H, f, quad::Axis{t0, t1}, space_lo, space_hi)));
      },
      py::arg("H"), py::arg("f"), py::arg("t0"), py::arg("t1"),
      py::arg("space_lo"), py::arg("space_hi"));
}
