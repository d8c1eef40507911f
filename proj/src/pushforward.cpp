#include "ambit/pushforward.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace ambit::pushforward {

namespace {

using measure::JumpDensity;
using measure::SpaceControl;

struct CellImage {
  double h;       // H(t, x_i)
  double weight;  // A-weight of the cell
  std::vector<double> center;
};

}  // namespace

CharacteristicTriplet NullSpatialTriplet::as_triplet() const {
  CharacteristicTriplet t;
  const auto d = drift;
  const auto g = gaussian;
  const auto j = jumps;
  t.drift = [d](double tt, std::span<const double>) { return d(tt); };
  t.gaussian = measure::GaussianPart::orthogonal(
      [g](double tt, std::span<const double>) { return g(tt); });
  t.jumps = [j](double tt, std::span<const double>) { return j(tt); };
  t.control.time = time;
  t.control.space = SpaceControl::single_point();
  t.tau = tau;
  return t;
}

NullSpatialTriplet pushforward_characteristics(
    const CharacteristicTriplet& triplet, const IntegrandSpec& H,
    const TruncationFunction& tau, const quad::QuadConfig& cfg,
    bool skip_integrability_check) {
  if (triplet.gaussian.kind != measure::GaussianPart::Kind::Orthogonal) {
    throw std::invalid_argument(
        "pushforward characteristics require an orthogonal triplet");
  }
  if (triplet.control.space.kind == SpaceControl::Kind::LebesgueBox) {
    throw std::invalid_argument(
        "pushforward aggregation needs a cell-based space (finite grid or "
        "probability)");
  }
  CharacteristicTriplet working = triplet;
  if (tau.kind != triplet.tau.kind || tau.bound != triplet.tau.bound) {
    working = measure::retruncate(triplet, tau, cfg);
  }
  if (!skip_integrability_check) {
    const auto report = integrability::check_integrable(H, working, tau, cfg);
    if (report.conjunction == integrability::Conjunction::NotIntegrable) {
      throw NotIntegrableError("integrand is not in L0 of the basis");
    }
    if (report.conjunction == integrability::Conjunction::Inconclusive) {
      throw NotIntegrableError(
          "integrability of the integrand could not be certified");
    }
  }

  NullSpatialTriplet out;
  out.time = working.control.time;
  out.tau = tau;
  const auto cells = working.control.space.cells;
  const auto Hf = H;
  const auto drift_f = working.drift;
  const auto c_f = working.gaussian.c;
  const auto jumps_f = working.jumps;
  const quad::QuadConfig jcfg = cfg.inner();

  out.drift = [cells, Hf, drift_f, jumps_f, tau, jcfg](double t) {
    double acc = 0.0;
    for (const auto& cell : cells) {
      const double h = Hf.effective(t, cell.center);
      double term = h * drift_f(t, cell.center);
      const auto spec = jumps_f(t, cell.center);
      if (!spec.is_zero()) {
        const auto g = [&](double y) { return tau(h * y) - h * tau(y); };
        const auto v = integrate_jump(g, spec, jcfg);
        if (!v.finite()) {
          throw quad::EvaluationError("pushforward drift integral did not converge",
                                      {t});
        }
        term += v.value;
      }
      acc += cell.weight * term;
    }
    return acc;
  };

  out.gaussian = [cells, Hf, c_f](double t) {
    double acc = 0.0;
    for (const auto& cell : cells) {
      const double h = Hf.effective(t, cell.center);
      acc += cell.weight * h * h * c_f(t, cell.center);
    }
    return acc;
  };

  out.jumps = [cells, Hf, jumps_f](double t) {
    JumpMeasureSpec image;
    std::vector<std::pair<double, JumpDensity>> scaled;  // (h, source density)
    std::vector<double> weights;
    for (const auto& cell : cells) {
      const double h = Hf.effective(t, cell.center);
      if (h == 0.0) continue;  // jumps of size zero are no jumps
      const auto spec = jumps_f(t, cell.center);
      for (const auto& a : spec.atoms) {
        image.atoms.push_back({h * a.size, a.mass * cell.weight});
      }
      if (spec.density) {
        scaled.emplace_back(h, *spec.density);
        weights.push_back(cell.weight);
      }
    }
    if (!scaled.empty()) {
      JumpDensity mix;
      double lo = 0.0, hi = 0.0;
      double a0 = 0.0, ai = 0.0;
      for (const auto& [h, den] : scaled) {
        const double b1 = h * den.support_lo;
        const double b2 = h * den.support_hi;
        lo = std::min({lo, b1, b2});
        hi = std::max({hi, b1, b2});
        a0 = std::max(a0, den.alpha0);
        ai = std::max(ai, den.alpha_inf);
      }
      mix.support_lo = lo;
      mix.support_hi = hi;
      mix.alpha0 = a0;
      mix.alpha_inf = ai;
      mix.rho = [scaled, weights](double z) {
        double acc = 0.0;
        for (size_t i = 0; i < scaled.size(); ++i) {
          const auto& [h, den] = scaled[i];
          const double y = z / h;
          if (y >= den.support_lo && y <= den.support_hi) {
            acc += weights[i] * den.rho(y) / std::abs(h);
          }
        }
        return acc;
      };
      image.density = std::move(mix);
    }
    return image;
  };
  return out;
}

double simple_integral(std::span<const WeightedRegion> summands,
                       const sim::BasisRealization& realization) {
  double acc = 0.0;
  for (const auto& s : summands) {
    acc += s.coefficient * sim::region_mass(realization, s.region);
  }
  return acc;
}

std::vector<std::pair<double, double>> simulate_path_integral(
    const IntegrandSpec& H, const CharacteristicTriplet& triplet, double horizon,
    int n_steps, std::uint64_t seed, const sim::SimOptions& opts) {
  const auto grid = sim::GridSpec::uniform(triplet.control.time.t0,
                                           triplet.control.time.t0 + horizon,
                                           n_steps, triplet.control.space.cells);
  const auto real = sim::simulate_levy_basis(triplet, grid, 0.0, seed, opts);

  std::vector<double> cell_sum(grid.n_cells(), 0.0);
  for (int cell = 0; cell < grid.n_cells(); ++cell) {
    cell_sum[cell] = real.gaussian[cell] + real.drift[cell];
  }
  for (const auto& j : real.jumps) cell_sum[j.cell] += j.size;

  std::vector<std::pair<double, double>> path;
  path.reserve(n_steps + 1);
  double acc = 0.0;
  path.emplace_back(grid.t0, 0.0);
  for (int step = 0; step < grid.n_steps; ++step) {
    const double tc = 0.5 * (grid.step_lo(step) + grid.step_hi(step));
    for (size_t s = 0; s < grid.space.size(); ++s) {
      const int cell = grid.cell_index(step, static_cast<int>(s));
      acc += H.effective(tc, grid.space[s].center) * cell_sum[cell];
    }
    path.emplace_back(grid.step_hi(step), acc);
  }
  return path;
}

std::complex<double> exponent_over_window(const NullSpatialTriplet& ns, double t0,
                                          double t1, double u,
                                          const quad::QuadConfig& cfg) {
  measure::Region region;
  region.t0 = t0;
  region.t1 = t1;
  return measure::levy_khintchine_exponent(ns.as_triplet(), region, u, cfg);
}

CfCheckResult cf_distance(const IntegrandSpec& H,
                          const CharacteristicTriplet& triplet,
                          const TruncationFunction& tau, double horizon,
                          std::span<const double> u_grid, int n_samples,
                          std::uint64_t seed, int n_steps, int threads,
                          const quad::QuadConfig& cfg) {
  const double t0 = triplet.control.time.t0;

  // The law under test is that of the integral up to the horizon, so the
  // integrability precondition is checked on the clipped window.
  CharacteristicTriplet working = triplet;
  working.control.time.t1 = std::min(working.control.time.t1, t0 + horizon);
  if (tau.kind != triplet.tau.kind || tau.bound != triplet.tau.bound) {
    working = measure::retruncate(working, tau, cfg);
  }
  const auto ns = pushforward_characteristics(working, H, tau, cfg);
  const auto grid = sim::GridSpec::uniform(t0, t0 + horizon, n_steps,
                                           working.control.space.cells);

  const size_t nu = u_grid.size();
  const int n_workers = std::max(1, threads);

  // Workers fill disjoint per-path slots; the reduction below runs in path
  // order, so results are bitwise independent of the worker count.
  std::vector<double> path_values(n_samples, 0.0);
  auto run_range = [&](int lo, int hi) {
    for (int p = lo; p < hi; ++p) {
      const auto real = sim::simulate_levy_basis(
          working, grid, 0.0, rng::derive_seed(seed, static_cast<std::uint64_t>(p)));
      double x = 0.0;
      for (int cell = 0; cell < grid.n_cells(); ++cell) {
        const int step = grid.step_of(cell);
        const double tc = 0.5 * (grid.step_lo(step) + grid.step_hi(step));
        x += H.effective(tc, grid.space[grid.space_of(cell)].center) *
             (real.gaussian[cell] + real.drift[cell]);
      }
      for (const auto& j : real.jumps) {
        x += H.effective(j.t, grid.space[grid.space_of(j.cell)].center) * j.size;
      }
      path_values[p] = x;
    }
  };

  if (n_workers == 1) {
    run_range(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_samples + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(n_samples, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  CfCheckResult out;
  const double nn = static_cast<double>(n_samples);
  for (size_t k = 0; k < nu; ++k) {
    double sre = 0.0, sim_ = 0.0, sre2 = 0.0, sim2 = 0.0;
    for (int p = 0; p < n_samples; ++p) {
      const double re = std::cos(u_grid[k] * path_values[p]);
      const double im = std::sin(u_grid[k] * path_values[p]);
      sre += re;
      sim_ += im;
      sre2 += re * re;
      sim2 += im * im;
    }
    const std::complex<double> emp{sre / nn, sim_ / nn};
    const auto psi = exponent_over_window(ns, t0, t0 + horizon, u_grid[k], cfg);
    const std::complex<double> theo = std::exp(psi);
    const double var_re = std::max(0.0, (sre2 - sre * sre / nn) / (nn - 1.0));
    const double var_im = std::max(0.0, (sim2 - sim_ * sim_ / nn) / (nn - 1.0));
    const double se = std::sqrt((var_re + var_im) / nn);
    const double dist = std::abs(emp - theo);
    out.rows.push_back({u_grid[k], emp, theo, se, se > 0.0 ? dist / se : 0.0});
    out.max_distance = std::max(out.max_distance, dist);
  }
  return out;
}

}  // namespace ambit::pushforward
