#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ambit/ambit_kernels.hpp"
#include "ambit/basis_sim.hpp"
#include "ambit/config.hpp"
#include "ambit/integrability.hpp"
#include "ambit/pushforward.hpp"
#include "ambit/selftest.hpp"
#include "ambit/volmod.hpp"

#ifndef AMBIT_CONFIG_DIR
#define AMBIT_CONFIG_DIR ""
#endif

namespace {

using namespace ambit;

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = 2;
  std::string out_dir;
  quad::QuadConfig quad;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const GlobalOpts& g, const std::string& name,
                const std::string& content) {
  if (g.out_dir.empty()) return;
  std::filesystem::create_directories(g.out_dir);
  std::ofstream out(g.out_dir + "/" + name, std::ios::binary);
  out << content;
}

measure::JumpMeasureSpec parse_nu(const std::string& text) {
  // "atom:SIZE:MASS[,atom:SIZE:MASS...]"
  measure::JumpMeasureSpec spec;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.rfind("atom:", 0) != 0) {
      throw io::ConfigError("unsupported jump measure '" + part +
                            "' (use atom:SIZE:MASS)");
    }
    const auto rest = part.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) {
      throw io::ConfigError("atom needs SIZE:MASS");
    }
    spec.atoms.push_back({std::stod(rest.substr(0, colon)),
                          std::stod(rest.substr(colon + 1))});
  }
  return spec;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(std::stod(part));
  }
  return out;
}

int require_valid(const measure::CharacteristicTriplet& triplet,
                  const quad::QuadConfig& cfg) {
  const auto violations = measure::validate_triplet(triplet, cfg);
  if (violations.empty()) return 0;
  for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
  return 2;
}

int cmd_check(const GlobalOpts& g, const std::string& triplet_path,
              const std::string& integrand_path, const std::string& tau_text) {
  const auto triplet = io::load_triplet(triplet_path);
  if (const int rc = require_valid(triplet, g.quad)) return rc;
  const auto H = io::load_integrand(integrand_path);
  const auto tau = tau_text.empty() ? triplet.tau : io::parse_tau(tau_text);

  const auto report = integrability::check_integrable(H, triplet, tau, g.quad);
  auto line = [](const char* name, const quad::Verdict& v) {
    std::cout << "  " << name << ": " << quad::to_string(v.outcome);
    if (v.finite()) std::cout << " value=" << v.value << " err=" << v.err;
    if (v.infinite()) std::cout << " slope=" << v.slope;
    if (!v.reason.empty()) std::cout << " (" << v.reason << ")";
    std::cout << "\n";
  };
  std::cout << "tau: " << report.tau_used.describe() << "\n";
  std::cout << "variant: " << integrability::to_string(report.variant) << "\n";
  line("cond1(drift)", report.cond1);
  line("cond2(gaussian)", report.cond2);
  if (report.cond2_strict) line("cond2(strict)", *report.cond2_strict);
  line(report.tau_used.is_zero() ? "cond3(1^|Hy|)" : "cond3(1^(Hy)^2)",
       report.cond3);
  std::cout << "conjunction: " << integrability::to_string(report.conjunction)
            << "\n";

  std::string csv = "condition,outcome,value,err\n";
  auto row = [&](const char* name, const quad::Verdict& v) {
    csv += std::string(name) + "," + quad::to_string(v.outcome) + "," +
           fmt(v.finite() ? v.value : 0.0) + "," + fmt(v.finite() ? v.err : 0.0) +
           "\n";
  };
  row("cond1", report.cond1);
  row("cond2", report.cond2);
  if (report.cond2_strict) row("cond2_strict", *report.cond2_strict);
  row("cond3", report.cond3);
  csv += std::string("conjunction,") +
         integrability::to_string(report.conjunction) + ",,\n";
  write_file(g, "check.csv", csv);
  return 0;
}

int cmd_pushforward(const GlobalOpts& g, const std::string& triplet_path,
                    const std::string& integrand_path, const std::string& tau_text,
                    double t0, double t1, int samples) {
  const auto triplet = io::load_triplet(triplet_path);
  if (const int rc = require_valid(triplet, g.quad)) return rc;
  const auto H = io::load_integrand(integrand_path);
  const auto tau = tau_text.empty() ? triplet.tau : io::parse_tau(tau_text);
  const auto ns = pushforward::pushforward_characteristics(triplet, H, tau, g.quad);

  std::string csv = "t,drift,gaussian,jump_atoms\n";
  for (int i = 0; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * (i + 0.5) / samples;
    const auto spec = ns.jumps(t);
    std::string atoms;
    for (const auto& a : spec.atoms) {
      if (!atoms.empty()) atoms += ";";
      atoms += fmt(a.size) + ":" + fmt(a.mass);
    }
    csv += fmt(t) + "," + fmt(ns.drift(t)) + "," + fmt(ns.gaussian(t)) + "," +
           atoms + "\n";
  }
  std::cout << csv;
  write_file(g, "pushforward.csv", csv);
  return 0;
}

int cmd_cfcheck(const GlobalOpts& g, const std::string& triplet_path,
                const std::string& integrand_path, const std::string& tau_text,
                double horizon, const std::string& u_text, int paths, int steps) {
  const auto triplet = io::load_triplet(triplet_path);
  if (const int rc = require_valid(triplet, g.quad)) return rc;
  const auto H = io::load_integrand(integrand_path);
  const auto tau = tau_text.empty() ? triplet.tau : io::parse_tau(tau_text);
  const auto us = parse_list(u_text);
  const auto res = pushforward::cf_distance(H, triplet, tau, horizon, us, paths,
                                            g.seed, steps, g.threads, g.quad);
  std::string csv = "u,emp_re,emp_im,theo_re,theo_im,z\n";
  for (const auto& row : res.rows) {
    csv += fmt(row.u) + "," + fmt(row.empirical.real()) + "," +
           fmt(row.empirical.imag()) + "," + fmt(row.theoretical.real()) + "," +
           fmt(row.theoretical.imag()) + "," + fmt(row.z) + "\n";
  }
  std::cout << csv;
  std::cout << "max distance: " << res.max_distance << "\n";
  write_file(g, "cfcheck.csv", csv);
  return 0;
}

int cmd_simulate_basis(const GlobalOpts& g, const std::string& triplet_path,
                       const std::string& grid_text, double eps,
                       const std::string& mode_text) {
  const auto triplet = io::load_triplet(triplet_path);
  if (const int rc = require_valid(triplet, g.quad)) return rc;
  const auto parts = parse_list(grid_text);
  if (parts.size() != 3) {
    throw io::ConfigError("--grid needs t0,t1,steps");
  }
  const auto grid = sim::GridSpec::uniform(parts[0], parts[1],
                                           static_cast<int>(parts[2]),
                                           triplet.control.space.cells);
  sim::SimOptions opts;
  opts.quad = g.quad;
  opts.mode = mode_text == "dropped" ? sim::SmallJumpMode::Dropped
                                     : sim::SmallJumpMode::DiffusionApprox;
  const auto real = sim::simulate_levy_basis(triplet, grid, eps, g.seed, opts);
  const auto cells = sim::cells_csv(real);
  const auto jumps = sim::jumps_csv(real);
  std::cout << cells;
  std::cout << jumps;
  write_file(g, "cells.csv", cells);
  write_file(g, "jumps.csv", jumps);
  return 0;
}

int cmd_ambit(const GlobalOpts& g, const std::string& triplet_path,
              const std::string& kernel_text, const std::string& grid_text,
              double eps, const std::string& t_text, const std::string& x_text) {
  const auto triplet = io::load_triplet(triplet_path);
  if (const int rc = require_valid(triplet, g.quad)) return rc;
  const auto parts = parse_list(grid_text);
  if (parts.size() != 3) throw io::ConfigError("--grid needs t0,t1,steps");
  const auto grid = sim::GridSpec::uniform(parts[0], parts[1],
                                           static_cast<int>(parts[2]),
                                           triplet.control.space.cells);
  sim::SimOptions opts;
  opts.quad = g.quad;
  const auto real = sim::simulate_levy_basis(triplet, grid, eps, g.seed, opts);

  kernels::KernelSpec kernel;
  if (kernel_text.rfind("exp:", 0) == 0) {
    kernel = kernels::KernelSpec::exponential(std::stod(kernel_text.substr(4)));
  } else if (kernel_text.rfind("heat:", 0) == 0) {
    kernel = kernels::KernelSpec::heat(std::stoi(kernel_text.substr(5)));
  } else if (kernel_text == "one") {
    kernel = kernels::KernelSpec::custom(
        [](double t, double s, std::span<const double>, std::span<const double>) {
          return s <= t ? 1.0 : 0.0;
        });
  } else {
    throw io::ConfigError("unknown kernel '" + kernel_text +
                          "' (use exp:ETA, heat:D or one)");
  }

  std::vector<kernels::QueryPoint> queries;
  for (double t : parse_list(t_text)) {
    for (double x : parse_list(x_text.empty() ? "0" : x_text)) {
      queries.push_back({t, {x}});
    }
  }
  const auto values = kernels::evaluate_ambit(kernel, nullptr, real, queries);
  std::string csv = "t,x,Y\n";
  for (size_t i = 0; i < queries.size(); ++i) {
    csv += fmt(queries[i].t) + "," + fmt(queries[i].x[0]) + "," + fmt(values[i]) +
           "\n";
  }
  std::cout << csv;
  write_file(g, "ambit.csv", csv);
  return 0;
}

int cmd_heat(const GlobalOpts& g, int d, double p, double t) {
  const auto v = kernels::heat_lp_verdict(p, d, t, g.quad);
  std::cout << "heat kernel L^" << p << " on d=" << d << ", t=" << t << ": "
            << quad::to_string(v.outcome);
  if (v.finite()) std::cout << " value=" << v.value << " err=" << v.err;
  if (v.infinite()) std::cout << " slope=" << v.slope;
  std::cout << " (threshold p < " << 1.0 + 2.0 / d << ")\n";
  return 0;
}

int cmd_cogarch(const GlobalOpts& g, double beta, double eta, double phi,
                const std::string& nu_text, double horizon, double dt) {
  volmod::CogarchParams params;
  params.beta = beta;
  params.eta = eta;
  params.phi = phi;
  params.driver = parse_nu(nu_text);
  const auto path = volmod::simulate_cogarch(params, horizon, g.seed, dt);
  std::string csv = "t,V,G\n";
  for (size_t i = 0; i < path.t.size(); ++i) {
    csv += fmt(path.t[i]) + "," + fmt(path.V[i]) + "," + fmt(path.G[i]) + "\n";
  }
  std::cout << csv;
  write_file(g, "cogarch.csv", csv);
  return 0;
}

int cmd_supcogarch(const GlobalOpts& g, double beta, double eta,
                   const std::string& pi_text, const std::string& nu_text,
                   double horizon, double dt) {
  volmod::SupCogarchParams params;
  params.beta = beta;
  params.eta = eta;
  params.driver = parse_nu(nu_text);
  std::stringstream ss(pi_text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw io::ConfigError("--pi needs PHI:PROB pairs");
    }
    params.pi.emplace_back(std::stod(part.substr(0, colon)),
                           std::stod(part.substr(colon + 1)));
  }
  const auto path = volmod::simulate_supcogarch(params, horizon, g.seed, dt);
  std::string csv = "t,Vbar";
  for (double phi : path.phis) {
    char label[32];
    std::snprintf(label, sizeof(label), ",V_phi%g", phi);
    csv += label;
  }
  csv += "\n";
  for (size_t i = 0; i < path.t.size(); ++i) {
    csv += fmt(path.t[i]) + "," + fmt(path.vbar_sde[i]);
    for (const auto& comp : path.components) csv += "," + fmt(comp[i]);
    csv += "\n";
  }
  std::cout << csv;
  write_file(g, "supcogarch.csv", csv);
  return 0;
}

int cmd_phimax(const GlobalOpts&, const std::string& nu_text, double eta,
               double tol) {
  const auto r = volmod::phi_max(parse_nu(nu_text), eta, tol);
  if (!r.finite) {
    std::cout << "phi_max: inf (" << r.diagnostic << ")\n";
    return 0;
  }
  std::cout << "phi_max: " << fmt(r.value) << " residual=" << r.residual << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ambit-kit: characteristic triplets of space-time random measures, "
      "integrability checks, and the simulators that validate them"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "root seed for all randomness");
  app.add_option("--threads", g.threads, "Monte Carlo worker cap");
  app.add_option("--out-dir", g.out_dir, "directory for CSV outputs");
  app.add_option("--rel-tol", g.quad.rel_tol, "quadrature relative tolerance");
  app.add_option("--ladder-max", g.quad.ladder_rungs,
                 "number of geometric truncation rungs");
  app.add_option("--divergence-slope", g.quad.divergence_slope,
                 "log-log slope above which a sequence is called divergent");

  std::string triplet_path, integrand_path, tau_text, u_text = "0.5,1,2";
  std::string nu_text = "atom:1:1", pi_text = "0.2:1", kernel_text = "exp:1";
  std::string grid_text = "0,1,16", t_text = "1", x_text, mode_text = "diffusion";
  std::string config_dir = AMBIT_CONFIG_DIR;
  double t0 = 0.0, t1 = 1.0, horizon = 5.0, eps = 0.0, p = 2.0, tq = 1.0;
  double beta = 1.0, eta = 1.0, phi = 0.2, dt = 0.1, tol = 1e-10;
  int samples = 16, paths = 10000, steps = 64, d = 1;

  auto* check = app.add_subcommand("check", "decide integrability of H against a triplet");
  check->add_option("--triplet", triplet_path, "triplet TOML file")->required();
  check->add_option("--integrand", integrand_path, "integrand TOML file")->required();
  check->add_option("--tau", tau_text, "zero or standard:B (default: triplet's)");

  auto* pf = app.add_subcommand("pushforward", "characteristics of the integral process");
  pf->add_option("--triplet", triplet_path)->required();
  pf->add_option("--integrand", integrand_path)->required();
  pf->add_option("--tau", tau_text);
  pf->add_option("--t0", t0);
  pf->add_option("--t1", t1);
  pf->add_option("--samples", samples);

  auto* cf = app.add_subcommand("cfcheck", "empirical vs theoretical characteristic function");
  cf->add_option("--triplet", triplet_path)->required();
  cf->add_option("--integrand", integrand_path)->required();
  cf->add_option("--tau", tau_text);
  cf->add_option("--horizon", horizon);
  cf->add_option("--u", u_text, "comma-separated u grid");
  cf->add_option("--paths", paths);
  cf->add_option("--steps", steps);

  auto* sb = app.add_subcommand("simulate-basis", "simulate one basis realization");
  sb->add_option("--triplet", triplet_path)->required();
  sb->add_option("--grid", grid_text, "t0,t1,steps");
  sb->add_option("--eps", eps, "small-jump cutoff");
  sb->add_option("--small-jumps", mode_text, "diffusion or dropped");

  auto* am = app.add_subcommand("ambit", "evaluate an ambit process on a realization");
  am->add_option("--triplet", triplet_path)->required();
  am->add_option("--kernel", kernel_text, "exp:ETA, heat:D or one");
  am->add_option("--grid", grid_text, "t0,t1,steps");
  am->add_option("--eps", eps);
  am->add_option("--t", t_text, "query times");
  am->add_option("--x", x_text, "query space points");

  auto* he = app.add_subcommand("heat", "heat kernel L^p membership verdict");
  he->add_option("--d", d)->required();
  he->add_option("--p", p)->required();
  he->add_option("--t", tq);

  auto* cg = app.add_subcommand("cogarch", "simulate a COGARCH path");
  cg->add_option("--beta", beta);
  cg->add_option("--eta", eta);
  cg->add_option("--phi", phi);
  cg->add_option("--nu", nu_text, "driver jumps, atom:SIZE:MASS[,...]");
  cg->add_option("--horizon", horizon);
  cg->add_option("--dt", dt);

  auto* sc = app.add_subcommand("supcogarch", "simulate a supCOGARCH path");
  sc->add_option("--beta", beta);
  sc->add_option("--eta", eta);
  sc->add_option("--pi", pi_text, "mixing law, PHI:PROB[,...]");
  sc->add_option("--nu", nu_text);
  sc->add_option("--horizon", horizon);
  sc->add_option("--dt", dt);

  auto* pm = app.add_subcommand("phimax", "stationarity boundary of the COGARCH phi");
  pm->add_option("--nu", nu_text);
  pm->add_option("--eta", eta);
  pm->add_option("--tol", tol);

  auto* st = app.add_subcommand("selftest", "run the acceptance experiments");
  st->add_option("--config-dir", config_dir, "bundled config directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (check->parsed()) return cmd_check(g, triplet_path, integrand_path, tau_text);
    if (pf->parsed()) {
      return cmd_pushforward(g, triplet_path, integrand_path, tau_text, t0, t1,
                             samples);
    }
    if (cf->parsed()) {
      return cmd_cfcheck(g, triplet_path, integrand_path, tau_text, horizon,
                         u_text, paths, steps);
    }
    if (sb->parsed()) return cmd_simulate_basis(g, triplet_path, grid_text, eps, mode_text);
    if (am->parsed()) {
      return cmd_ambit(g, triplet_path, kernel_text, grid_text, eps, t_text, x_text);
    }
    if (he->parsed()) return cmd_heat(g, d, p, tq);
    if (cg->parsed()) return cmd_cogarch(g, beta, eta, phi, nu_text, horizon, dt);
    if (sc->parsed()) {
      return cmd_supcogarch(g, beta, eta, pi_text, nu_text, horizon, dt);
    }
    if (pm->parsed()) return cmd_phimax(g, nu_text, eta, tol);
    if (st->parsed()) {
      selftest::Options opts;
      opts.config_dir = config_dir;
      opts.threads = g.threads;
      return selftest::run_all(opts, std::cout) == 0 ? 0 : 1;
    }
  } catch (const io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const io::TomlError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
