#include "ambit/ambit_kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ambit::kernels {

double heat_green(double t, double s, std::span<const double> x,
                  std::span<const double> y, int d) {
  double r2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double dx = x[i] - y[i];
    r2 += dx * dx;
  }
  if (s >= t) {
    if (s == t && r2 == 0.0) {
      throw SingularEvaluation("heat kernel evaluated on its diagonal s=t, x=y");
    }
    return 0.0;
  }
  if (s <= 0.0) return 0.0;
  const double tau = t - s;
  return std::exp(-r2 / (4.0 * tau)) /
         std::pow(4.0 * M_PI * tau, 0.5 * static_cast<double>(d));
}

double KernelSpec::operator()(double t, double s, std::span<const double> x,
                              std::span<const double> y) const {
  switch (kind) {
    case Kind::Heat:
      return heat_green(t, s, x, y, heat_dim);
    case Kind::Exponential:
      return s <= t ? std::exp(-eta * (t - s)) : 0.0;
    case Kind::Tabulated: {
      const double lag = t - s;
      if (lag < 0.0 || lag_grid.empty()) return 0.0;
      if (lag <= lag_grid.front()) return lag_values.front();
      if (lag >= lag_grid.back()) return 0.0;
      const auto it = std::upper_bound(lag_grid.begin(), lag_grid.end(), lag);
      const size_t hi = static_cast<size_t>(it - lag_grid.begin());
      const size_t lo = hi - 1;
      const double w = (lag - lag_grid[lo]) / (lag_grid[hi] - lag_grid[lo]);
      return lag_values[lo] + w * (lag_values[hi] - lag_values[lo]);
    }
    case Kind::Custom:
      return fn(t, s, x, y);
  }
  return 0.0;
}

KernelSpec KernelSpec::tabulated(std::vector<double> lags,
                                 std::vector<double> vals) {
  KernelSpec k;
  k.kind = Kind::Tabulated;
  k.lag_grid = std::move(lags);
  k.lag_values = std::move(vals);
  return k;
}

KernelSpec KernelSpec::custom(
    std::function<double(double, double, std::span<const double>,
                         std::span<const double>)>
        f) {
  KernelSpec k;
  k.kind = Kind::Custom;
  k.fn = std::move(f);
  return k;
}

quad::Verdict heat_lp_verdict(double p, int d, double t,
                              const quad::QuadConfig& cfg) {
  if (!(p > 0.0) || d < 1 || d > 3 || !(t > 0.0)) {
    throw std::invalid_argument("heat_lp_verdict needs p>0, d in {1,2,3}, t>0");
  }
  const double omega = d == 1 ? 2.0 : (d == 2 ? 2.0 * M_PI : 4.0 * M_PI);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<quad::Axis> axes{quad::Axis{0.0, t, {t}}, quad::Axis{0.0, inf}};
  quad::QuadConfig c2 = cfg;
  c2.nonneg = true;
  const quad::FnN f = [p, d, t, omega](std::span<const double> pt) {
    const double tau = t - pt[0];
    const double r = pt[1];
    const double g = std::exp(-p * r * r / (4.0 * tau)) *
                     std::pow(4.0 * M_PI * tau, -0.5 * p * d);
    return omega * std::pow(r, d - 1) * g;
  };
  return quad::integrate_improper(f, axes, c2);
}

HeatExistenceResult check_heat_existence(double p, const measure::JumpMeasureSpec& nu,
                          double sigma_p_moment, int d, double t,
                          const quad::QuadConfig& cfg) {
  if (!(p > 0.0 && p < 2.0)) {
    throw std::invalid_argument("the sufficient condition needs p in (0,2)");
  }
  HeatExistenceResult out;
  out.kernel_side = heat_lp_verdict(p, d, t, cfg);
  if (out.kernel_side.finite()) {
    out.kernel_side.value *= sigma_p_moment;
    out.kernel_side.err *= sigma_p_moment;
  }
  const auto g = [p](double xi) {
    return std::abs(xi) <= 1.0 ? std::pow(std::abs(xi), p) : 0.0;
  };
  quad::QuadConfig jcfg = cfg;
  jcfg.nonneg = true;
  out.jump_side = integrate_jump(g, nu, jcfg);
  out.sufficient = out.kernel_side.finite() && out.jump_side.finite();
  return out;
}

std::vector<double> evaluate_ambit(const KernelSpec& kernel,
                                   const measure::TimeSpaceFn& sigma,
                                   const sim::BasisRealization& realization,
                                   std::span<const QueryPoint> queries) {
  const auto& grid = realization.grid;
  std::vector<double> cont(grid.n_cells());
  for (int cell = 0; cell < grid.n_cells(); ++cell) {
    cont[cell] = realization.gaussian[cell] + realization.drift[cell];
  }
  auto sig = [&sigma](double s, std::span<const double> y) {
    return sigma ? sigma(s, y) : 1.0;
  };
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    double acc = 0.0;
    const std::span<const double> xq(q.x);
    for (int cell = 0; cell < grid.n_cells(); ++cell) {
      if (cont[cell] == 0.0) continue;
      const int step = grid.step_of(cell);
      const double sc = 0.5 * (grid.step_lo(step) + grid.step_hi(step));
      const auto& yc = grid.space[grid.space_of(cell)].center;
      acc += kernel(q.t, sc, xq, yc) * sig(sc, yc) * cont[cell];
    }
    for (const auto& j : realization.jumps) {
      const auto& yc = grid.space[grid.space_of(j.cell)].center;
      acc += kernel(q.t, j.t, xq, yc) * sig(j.t, yc) * j.size;
    }
    out.push_back(acc);
  }
  return out;
}

const char* to_string(ColoredClass c) {
  switch (c) {
    case ColoredClass::InL0Only: return "InL0_only";
    case ColoredClass::InL10: return "InL10";
    case ColoredClass::NotInL0: return "NotInL0";
    case ColoredClass::Inconclusive: return "Inconclusive";
  }
  return "?";
}

ColoredClass classify_colored_example(
    const std::function<double(double, double)>& H, const quad::Fn1& f,
    const quad::Axis& time_axis, double space_lo, double space_hi,
    const quad::QuadConfig& cfg) {
  const auto habs = [&H](double t, double x) { return std::abs(H(t, x)); };
  quad::QuadConfig scfg = cfg;
  scfg.nonneg = true;
  const auto strict =
      quad::bimeasure_integral(habs, habs, f, time_axis, space_lo, space_hi, scfg);
  if (strict.finite()) return ColoredClass::InL10;

  const auto l0 =
      integrability::colored_l0_verdict(H, f, time_axis, space_lo, space_hi, cfg);
  if (l0.infinite()) return ColoredClass::NotInL0;
  if (l0.finite() && strict.infinite()) return ColoredClass::InL0Only;
  return ColoredClass::Inconclusive;
}

RefinementReport refinement_study(const KernelSpec& kernel,
                                  const measure::TimeSpaceFn& sigma,
                                  const measure::CharacteristicTriplet& triplet,
                                  double horizon, const QueryPoint& query,
                                  std::uint64_t seed, int coarse_steps,
                                  int doublings, const sim::SimOptions& opts) {
  // One realization at the finest grid; coarser levels lump the continuous
  // cell masses at block centers while the jump list stays fixed, isolating
  // the kernel-discretisation drift.
  const int fine_steps = coarse_steps << doublings;
  const auto grid = sim::GridSpec::uniform(triplet.control.time.t0,
                                           triplet.control.time.t0 + horizon,
                                           fine_steps, triplet.control.space.cells);
  const auto real = sim::simulate_levy_basis(triplet, grid, 0.0, seed, opts);

  auto sig = [&sigma](double s, std::span<const double> y) {
    return sigma ? sigma(s, y) : 1.0;
  };
  RefinementReport report;
  const std::span<const double> xq(query.x);
  for (int level = 0; level <= doublings; ++level) {
    const int steps = coarse_steps << level;
    const int block = fine_steps / steps;
    double acc = 0.0;
    for (int cs = 0; cs < steps; ++cs) {
      const double lo = grid.t0 + cs * (horizon / steps);
      const double sc = lo + 0.5 * (horizon / steps);
      for (size_t s = 0; s < grid.space.size(); ++s) {
        double mass = 0.0;
        for (int b = 0; b < block; ++b) {
          const int cell = grid.cell_index(cs * block + b, static_cast<int>(s));
          mass += real.gaussian[cell] + real.drift[cell];
        }
        const auto& yc = grid.space[s].center;
        acc += kernel(query.t, sc, xq, yc) * sig(sc, yc) * mass;
      }
    }
    for (const auto& j : real.jumps) {
      const auto& yc = grid.space[grid.space_of(j.cell)].center;
      acc += kernel(query.t, j.t, xq, yc) * sig(j.t, yc) * j.size;
    }
    report.steps.push_back(steps);
    report.values.push_back(acc);
  }
  if (report.values.size() >= 2) {
    report.last_delta = std::abs(report.values.back() -
                                 report.values[report.values.size() - 2]);
  }
  return report;
}

}  // namespace ambit::kernels
