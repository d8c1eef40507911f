#include "ambit/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <ostream>
#include <sstream>
#include <vector>

#include "ambit/ambit_kernels.hpp"
#include "ambit/basis_sim.hpp"
#include "ambit/config.hpp"
#include "ambit/integrability.hpp"
#include "ambit/pushforward.hpp"
#include "ambit/volmod.hpp"

namespace ambit::selftest {

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
  std::ostringstream detail;
  bool ok = true;
  double budget_s = 0.0;
  Clock::time_point start = Clock::now();

  explicit Criterion(double budget) : budget_s(budget) {}

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }

  bool finish(std::ostream& out, int index, const std::string& name) {
    const double elapsed =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (elapsed >= budget_s) {
      ok = false;
      detail << " [failed: runtime " << elapsed << " s over budget " << budget_s
             << " s]";
    }
    out << (ok ? "[PASS]" : "[FAIL]") << " criterion " << index << ": " << name
        << detail.str() << " (" << elapsed << " s)\n";
    return ok;
  }
};

measure::CharacteristicTriplet compensated_poisson() {
  measure::CharacteristicTriplet t;
  t.drift = measure::constant_field(-1.0);
  t.gaussian = measure::GaussianPart::none();
  t.jumps = [](double, std::span<const double>) {
    return measure::JumpMeasureSpec::single_atom(1.0, 1.0);
  };
  t.control.time = measure::TimeControl::lebesgue(
      0.0, std::numeric_limits<double>::infinity());
  t.control.space = measure::SpaceControl::single_point();
  t.tau = measure::TruncationFunction::standard(1.0);
  return t;
}

bool criterion1_compensated_poisson(const Options& opts, std::ostream& out) {
  Criterion c(10.0);
  measure::CharacteristicTriplet triplet;
  integrability::IntegrandSpec H;
  if (!opts.config_dir.empty()) {
    triplet = io::load_triplet(opts.config_dir + "/compensated_poisson.toml");
    H = io::load_integrand(opts.config_dir + "/inv_one_plus_t.toml");
  } else {
    triplet = compensated_poisson();
    H = integrability::IntegrandSpec::of_time(
        [](double t) { return 1.0 / (1.0 + t); });
  }
  c.require(measure::validate_triplet(triplet).empty(), "triplet invalid");

  const auto proper = integrability::check_integrable(
      H, triplet, measure::TruncationFunction::standard(1.0));
  c.require(proper.conjunction == integrability::Conjunction::Integrable,
            "proper tau: not Integrable");
  c.require(proper.cond1.finite() && std::abs(proper.cond1.value) <= 1e-6,
            "cond1 not Finite(0 +- 1e-6)");
  c.require(proper.cond2.finite() && proper.cond2.value == 0.0,
            "cond2 not Finite(0)");
  c.require(proper.cond3.finite() && std::abs(proper.cond3.value - 1.0) <= 1e-4,
            "cond3 not Finite(1 +- 1e-4)");

  const auto zero = integrability::check_integrable(
      H, triplet, measure::TruncationFunction::zero());
  c.require(zero.cond1.infinite(), "tau=0: cond1 not Infinite");
  c.require(zero.cond3.infinite(), "tau=0: 1^|Hy| variant not Infinite");
  c.require(zero.conjunction == integrability::Conjunction::Inconclusive,
            "tau=0 conjunction should stay Inconclusive without a sign flag");
  c.detail << " cond1=" << proper.cond1.value << " cond3=" << proper.cond3.value;
  return c.finish(out, 1, "compensated-Poisson membership boundary");
}

bool criterion2_heat_threshold(std::ostream& out) {
  Criterion c(120.0);
  std::vector<double> ps{0.5, 1.0};
  for (double p = 1.25; p <= 3.5 + 1e-9; p += 0.25) ps.push_back(p);
  int checked = 0;
  for (int d = 1; d <= 3; ++d) {
    const double threshold = 1.0 + 2.0 / d;
    for (double p : ps) {
      if (std::abs(p - threshold) < 0.05) continue;
      const auto v = kernels::heat_lp_verdict(p, d, 1.0);
      ++checked;
      if (p < threshold) {
        c.require(v.finite(), "d=" + std::to_string(d) + " p=" + std::to_string(p) +
                                  " expected Finite, got " +
                                  quad::to_string(v.outcome));
      } else {
        c.require(v.infinite(), "d=" + std::to_string(d) + " p=" +
                                    std::to_string(p) + " expected Infinite, got " +
                                    quad::to_string(v.outcome));
      }
    }
  }
  c.detail << " " << checked << " (d,p) pairs, zero misclassifications required";
  return c.finish(out, 2, "heat kernel L^p threshold p < 1 + 2/d");
}

bool criterion3_phi_max(std::ostream& out) {
  Criterion c(1.0);
  const std::pair<double, double> cases[] = {{1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}};
  for (const auto& [m, eta] : cases) {
    const auto r =
        volmod::phi_max(measure::JumpMeasureSpec::single_atom(1.0, m), eta, 1e-10);
    const double exact = std::exp(eta / m) - 1.0;
    c.require(r.finite && std::abs(r.value - exact) <= 1e-6,
              "phi_max(" + std::to_string(m) + "," + std::to_string(eta) + ")");
    c.detail << " " << r.value;
  }
  return c.finish(out, 3, "phi_max closed forms exp(eta/m) - 1");
}

bool criterion4_cogarch_mean(const Options& opts, std::ostream& out) {
  Criterion c(60.0);
  volmod::CogarchParams params;
  params.beta = 1.0;
  params.eta = 1.0;
  params.phi = 0.2;
  params.driver = measure::JumpMeasureSpec::single_atom(1.0, 1.0);
  const int n_paths = 200;
  double sum = 0.0, sumsq = 0.0;
  double worst_fixrel = 0.0;
  for (int p = 0; p < n_paths; ++p) {
    const auto path = volmod::simulate_cogarch(params, 200.0,
                                               rng::derive_seed(opts.seed, p), 0.5);
    const double avg = volmod::time_average_v(path, params.beta, params.eta,
                                              20.0, 200.0);
    sum += avg;
    sumsq += avg * avg;
    for (const auto& j : path.jump_log) {
      const double rhs = params.phi * j.dg * j.dg;
      const double rel = std::abs(j.dv - rhs) /
                         std::max(std::abs(j.dv), 1e-300);
      worst_fixrel = std::max(worst_fixrel, rel);
    }
  }
  const double mean = sum / n_paths;
  const double se = std::sqrt(
      std::max(0.0, (sumsq - sum * sum / n_paths) / (n_paths - 1)) / n_paths);
  const double target = 1.0 / 0.8;
  c.require(std::abs(mean - target) <= 3.0 * se,
            "stationary mean outside 3 SE of 1.25");
  c.require(worst_fixrel <= 4.0 * std::numeric_limits<double>::epsilon(),
            "volatility/price jump identity above machine precision");
  c.detail << " mean=" << mean << " se=" << se
           << " max dV-vs-phi(dG)^2 rel=" << worst_fixrel;
  return c.finish(out, 4, "COGARCH stationary mean 1.25 and jump identity");
}

bool criterion5_pushforward_cf(const Options& opts, std::ostream& out) {
  Criterion c(120.0);
  measure::CharacteristicTriplet triplet;
  triplet.drift = measure::constant_field(0.0);
  triplet.gaussian = measure::GaussianPart::none();
  triplet.jumps = [](double, std::span<const double>) {
    return measure::JumpMeasureSpec::single_atom(1.0, 1.0);
  };
  triplet.control.time = measure::TimeControl::lebesgue(
      0.0, std::numeric_limits<double>::infinity());
  triplet.control.space = measure::SpaceControl::single_point();
  triplet.tau = measure::TruncationFunction::zero();
  const auto H = integrability::IntegrandSpec::of_time(
      [](double t) { return std::exp(-t); });
  const double us[] = {0.5, 1.0, 2.0};
  const auto res = pushforward::cf_distance(H, triplet,
                                            measure::TruncationFunction::zero(),
                                            5.0, us, 100000, opts.seed, 50,
                                            opts.threads);
  for (const auto& row : res.rows) {
    c.require(row.z < 3.0, "z-score at u=" + std::to_string(row.u));
    c.detail << " z(" << row.u << ")=" << row.z;
  }
  return c.finish(out, 5, "pushforward characteristic-function validation");
}

bool criterion6_supcogarch(const Options& opts, std::ostream& out) {
  Criterion c(30.0);
  volmod::SupCogarchParams params;
  params.beta = 1.0;
  params.eta = 1.0;
  params.pi = {{0.05, 0.4}, {0.2, 0.35}, {0.5, 0.25}};
  params.driver = measure::JumpMeasureSpec::single_atom(1.0, 1.0);
  double worst = 0.0;
  for (int p = 0; p < 20; ++p) {
    const auto path = volmod::simulate_supcogarch(
        params, 50.0, rng::derive_seed(opts.seed, 1000 + p), 0.5);
    for (size_t i = 0; i < path.t.size(); ++i) {
      worst = std::max(worst, std::abs(path.vbar_sde[i] - path.vbar_closed[i]));
    }
  }
  c.require(worst < 1e-8, "SDE vs closed form above 1e-8");
  c.detail << " sup|SDE-closed|=" << worst;

  volmod::SupCogarchParams degen = params;
  degen.pi = {{0.2, 1.0}};
  volmod::CogarchParams plain;
  plain.beta = params.beta;
  plain.eta = params.eta;
  plain.phi = 0.2;
  plain.driver = params.driver;
  const auto sup = volmod::simulate_supcogarch(degen, 50.0, opts.seed, 0.5);
  const auto cog = volmod::simulate_cogarch(plain, 50.0, opts.seed, 0.5);
  bool bitwise = sup.t.size() == cog.t.size();
  for (size_t i = 0; bitwise && i < sup.t.size(); ++i) {
    bitwise = sup.t[i] == cog.t[i] &&
              std::memcmp(&sup.vbar_sde[i], &cog.V[i], sizeof(double)) == 0;
  }
  c.require(bitwise, "degenerate mixing law does not reproduce COGARCH bitwise");
  return c.finish(out, 6, "supCOGARCH SDE/closed-form and degenerate case");
}

bool criterion7_colored_classification(std::ostream& out) {
  Criterion c(30.0);
  const auto H = [](double t, double x) {
    return (x >= 0.0 && x <= 2.0 * M_PI) ? t * std::sin(2.0 * x) : 0.0;
  };
  const quad::Fn1 f = [](double z) { return 0.5 * (1.0 + std::cos(z)); };
  const double inf = std::numeric_limits<double>::infinity();

  const auto cls = kernels::classify_colored_example(H, f, quad::Axis{0.0, inf},
                                                     0.0, 2.0 * M_PI);
  c.require(cls == kernels::ColoredClass::InL0Only,
            std::string("classified as ") + kernels::to_string(cls));

  for (double horizon : {1.0, 5.0}) {
    const auto v = quad::bimeasure_integral(H, H, f, quad::Axis{0.0, horizon},
                                            0.0, 2.0 * M_PI);
    c.require(v.finite() && std::abs(v.value) <= 1e-8,
              "signed bimeasure over [0," + std::to_string(horizon) +
                  "] not 0 +- 1e-8");
    c.detail << " |I(" << horizon << ")|=" << std::abs(v.value);
  }
  const auto habs = [&H](double t, double x) { return std::abs(H(t, x)); };
  quad::QuadConfig scfg;
  scfg.nonneg = true;
  const auto strict = quad::bimeasure_integral(habs, habs, f,
                                               quad::Axis{0.0, inf}, 0.0,
                                               2.0 * M_PI, scfg);
  c.require(strict.infinite(), "strict |H| integral over [0,inf) not Infinite");
  return c.finish(out, 7, "membership in L0 but not in the strict class");
}

bool criterion8_property_suites(const Options& opts, std::ostream& out) {
  Criterion c(240.0);

  // Mixed triplet exercising drift, Gaussian and jump parts.
  measure::CharacteristicTriplet triplet;
  triplet.drift = measure::constant_field(0.1);
  triplet.gaussian =
      measure::GaussianPart::orthogonal(measure::constant_field(0.5));
  triplet.jumps = [](double, std::span<const double>) {
    return measure::JumpMeasureSpec::single_atom(0.5, 0.7);
  };
  triplet.control.time = measure::TimeControl::lebesgue(0.0, 1.0);
  triplet.control.space = measure::SpaceControl::finite_grid(
      {{0, {0.0}, 0.25}, {1, {1.0}, 0.75}});
  triplet.tau = measure::TruncationFunction::standard(1.0);

  const auto grid = sim::GridSpec::uniform(0.0, 1.0, 2, triplet.control.space.cells);
  const int n = 100000;

  // Independent scatter + infinite-divisibility fingerprint in one sweep.
  const sim::GridRegion region_a{0.0, 0.5, {0}};
  const sim::GridRegion region_b{0.5, 1.0, {1}};
  const sim::GridRegion whole{0.0, 1.0, {}};
  double sa = 0.0, sb = 0.0, sab = 0.0, saa = 0.0, sbb = 0.0;
  const double us[] = {0.5, 1.0, 2.0};
  double cf_re[3] = {0, 0, 0}, cf_im[3] = {0, 0, 0};
  double cf_re2[3] = {0, 0, 0}, cf_im2[3] = {0, 0, 0};
  std::uint64_t count_sum = 0;
  double count_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto real =
        sim::simulate_levy_basis(triplet, grid, 0.0, rng::derive_seed(opts.seed, i));
    const double a = sim::region_mass(real, region_a);
    const double b = sim::region_mass(real, region_b);
    sa += a;
    sb += b;
    sab += a * b;
    saa += a * a;
    sbb += b * b;
    const double w = sim::region_mass(real, whole);
    for (int k = 0; k < 3; ++k) {
      const double re = std::cos(us[k] * w);
      const double im = std::sin(us[k] * w);
      cf_re[k] += re;
      cf_im[k] += im;
      cf_re2[k] += re * re;
      cf_im2[k] += im * im;
    }
    count_sum += real.jumps.size();
    count_sq += static_cast<double>(real.jumps.size()) *
                static_cast<double>(real.jumps.size());
  }
  {
    const double ma = sa / n, mb = sb / n;
    const double cov = sab / n - ma * mb;
    const double va = saa / n - ma * ma;
    const double vb = sbb / n - mb * mb;
    const double se_cov = std::sqrt(va * vb / n);
    c.require(std::abs(cov) <= 3.0 * se_cov,
              "disjoint regions correlate beyond 3 SE");
    c.detail << " cov=" << cov << " (3se=" << 3.0 * se_cov << ")";
  }
  for (int k = 0; k < 3; ++k) {
    const auto psi = measure::levy_khintchine_exponent(
        triplet, measure::Region{0.0, 1.0, {}}, us[k]);
    const auto theo = std::exp(psi);
    const std::complex<double> emp{cf_re[k] / n, cf_im[k] / n};
    const double var_re =
        std::max(0.0, (cf_re2[k] - cf_re[k] * cf_re[k] / n) / (n - 1.0));
    const double var_im =
        std::max(0.0, (cf_im2[k] - cf_im[k] * cf_im[k] / n) / (n - 1.0));
    const double se = std::sqrt((var_re + var_im) / n);
    c.require(std::abs(emp - theo) <= 3.0 * se,
              "CF differs from the exponent at u=" + std::to_string(us[k]));
  }
  {
    // Jump counts: Poisson with mean 0.7 over the unit-mass grid.
    const double mean = static_cast<double>(count_sum) / n;
    const double var = count_sq / n - mean * mean;
    const double se_mean = std::sqrt(0.7 / n);
    const double se_var = std::sqrt(2.0 * 0.7 * 0.7 / n + 0.7 / n);
    c.require(std::abs(mean - 0.7) <= 3.0 * se_mean, "jump count mean");
    c.require(std::abs(var - 0.7) <= 3.0 * se_var, "jump count variance");
    c.detail << " counts mean=" << mean << " var=" << var;
  }

  // Quadrature invariants: scaling, additivity, monotonicity, determinism.
  {
    const double inf = std::numeric_limits<double>::infinity();
    const quad::Fn1 f2 = [](double t) { return std::pow(1.0 + t, -2.0); };
    const quad::Fn1 f3 = [](double t) { return std::pow(1.0 + t, -3.0); };
    const quad::Fn1 f2s = [](double t) { return 3.7 * std::pow(1.0 + t, -2.0); };
    const auto base = quad::integrate_improper(f2, quad::Axis{0.0, inf});
    const auto scaled = quad::integrate_improper(f2s, quad::Axis{0.0, inf});
    c.require(base.finite() && scaled.finite() &&
                  std::abs(scaled.value - 3.7 * base.value) <=
                      1e-9 * std::abs(scaled.value),
              "scaling invariant");
    const auto left = quad::integrate_improper(f2, quad::Axis{0.0, 5.0});
    const auto right = quad::integrate_improper(f2, quad::Axis{5.0, inf});
    c.require(left.finite() && right.finite() &&
                  std::abs(left.value + right.value - base.value) <=
                      1e-9 * std::abs(base.value),
              "additivity invariant");
    const auto smaller = quad::integrate_improper(f3, quad::Axis{0.0, inf});
    c.require(!smaller.infinite(), "monotonicity: dominated integrand diverged");
    c.require(smaller.finite() &&
                  smaller.value <= base.value + base.err + smaller.err,
              "monotonicity: dominated value above dominating value");
    const auto again = quad::integrate_improper(f2, quad::Axis{0.0, inf});
    c.require(std::memcmp(&again.value, &base.value, sizeof(double)) == 0 &&
                  std::memcmp(&again.err, &base.err, sizeof(double)) == 0,
              "quadrature rerun not bitwise identical");
  }

  // Determinism: byte-identical realization serialisations and
  // worker-count-independent Monte Carlo aggregation.
  {
    const auto r1 = sim::simulate_levy_basis(triplet, grid, 0.0, opts.seed);
    const auto r2 = sim::simulate_levy_basis(triplet, grid, 0.0, opts.seed);
    c.require(sim::cells_csv(r1) == sim::cells_csv(r2) &&
                  sim::jumps_csv(r1) == sim::jumps_csv(r2),
              "realization rerun not byte-identical");

    const auto H1 = integrability::IntegrandSpec::of_time([](double) { return 1.0; });
    measure::CharacteristicTriplet cp = triplet;
    cp.gaussian = measure::GaussianPart::none();
    const double us2[] = {1.0};
    const auto one_thread = pushforward::cf_distance(
        H1, cp, cp.tau, 1.0, us2, 2000, opts.seed, 4, 1);
    const auto four_threads = pushforward::cf_distance(
        H1, cp, cp.tau, 1.0, us2, 2000, opts.seed, 4, 4);
    c.require(std::memcmp(&one_thread.rows[0].empirical,
                          &four_threads.rows[0].empirical,
                          sizeof(std::complex<double>)) == 0,
              "Monte Carlo aggregation depends on the worker count");
  }
  return c.finish(out, 8, "simulator fingerprints, quadrature invariants, determinism");
}

}  // namespace

int run_all(const Options& opts, std::ostream& out) {
  int failures = 0;
  failures += criterion1_compensated_poisson(opts, out) ? 0 : 1;
  failures += criterion2_heat_threshold(out) ? 0 : 1;
  failures += criterion3_phi_max(out) ? 0 : 1;
  failures += criterion4_cogarch_mean(opts, out) ? 0 : 1;
  failures += criterion5_pushforward_cf(opts, out) ? 0 : 1;
  failures += criterion6_supcogarch(opts, out) ? 0 : 1;
  failures += criterion7_colored_classification(out) ? 0 : 1;
  failures += criterion8_property_suites(opts, out) ? 0 : 1;
  out << (failures == 0 ? "acceptance suite: all criteria passed\n"
                        : "acceptance suite: " + std::to_string(failures) +
                              " criterion(s) failed\n");
  return failures;
}

}  // namespace ambit::selftest
