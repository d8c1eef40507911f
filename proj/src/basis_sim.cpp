#include "ambit/basis_sim.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <memory>

namespace ambit::sim {

namespace {

using measure::JumpMeasureSpec;

std::string fmt_row(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf);
}

// Piecewise-linear inverse-CDF sampler for the density part restricted to
// |y| > eps.
class DensitySampler {
 public:
  DensitySampler(const measure::JumpDensity& den, double eps,
                 const quad::QuadConfig& cfg) {
    build_side(den, eps, cfg, /*positive=*/true);
    build_side(den, eps, cfg, /*positive=*/false);
  }

  double total() const { return total_; }

  double sample(double u) const {
    const double target = u * total_;
    size_t lo = 0, hi = cdf_.size();
    while (lo + 1 < hi) {
      const size_t mid = (lo + hi) / 2;
      if (cdf_[mid] <= target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double m0 = cdf_[lo];
    const double m1 = lo + 1 < cdf_.size() ? cdf_[lo + 1] : total_;
    const double frac = m1 > m0 ? (target - m0) / (m1 - m0) : 0.5;
    return knots_[lo] + frac * (knots_[lo + 1] - knots_[lo]);
  }

 private:
  void build_side(const measure::JumpDensity& den, double eps,
                  const quad::QuadConfig& cfg, bool positive) {
    double a = positive ? std::max(eps, std::max(0.0, den.support_lo))
                        : std::max(eps, std::max(0.0, -den.support_hi));
    double b = positive ? den.support_hi : -den.support_lo;
    if (!(b > a)) return;
    // Geometric knots need a positive start even for finite-activity
    // densities whose support touches 0.
    if (a <= 0.0) a = std::min(1.0, std::isinf(b) ? 1.0 : b) * 1e-12;
    // Truncate an unbounded side where the remaining mass is negligible.
    if (std::isinf(b)) {
      b = std::max(1.0, 2.0 * a);
      for (int i = 0; i < 60; ++i) {
        const auto tailmass = quad::integrate_improper(
            quad::Fn1([&](double y) { return den.rho(positive ? y : -y); }),
            quad::Axis{b, 2.0 * b}, cfg);
        if (tailmass.finite() && tailmass.value < 1e-14 * std::max(total_, 1e-300)) break;
        b *= 2.0;
      }
    }
    const int n = 512;
    const size_t base = knots_.size();
    for (int i = 0; i <= n; ++i) {
      const double y = a * std::pow(b / a, static_cast<double>(i) / n);
      knots_.push_back(positive ? y : -y);
    }
    for (int i = 0; i < n; ++i) {
      const double ya = knots_[base + i];
      const double yb = knots_[base + i + 1];
      const auto m = quad::integrate_improper(
          quad::Fn1([&](double y) { return den.rho(y); }),
          quad::Axis{std::min(ya, yb), std::max(ya, yb)}, cfg);
      cdf_.push_back(total_);
      total_ += std::abs(m.value);
      if (i + 1 == n) {
        cdf_.push_back(total_);
      }
    }
  }

  std::vector<double> knots_;
  std::vector<double> cdf_;
  double total_ = 0.0;
};

double density_integral(const measure::JumpDensity& den,
                        const std::function<double(double)>& g, double from,
                        double to, const quad::QuadConfig& cfg,
                        bool origin_singular) {
  // Integrates g * rho over the support intersected with [from, to],
  // split at 0.
  const double lo = std::max(den.support_lo, from);
  const double hi = std::min(den.support_hi, to);
  if (!(hi > lo)) return 0.0;
  const quad::Fn1 f = [&](double y) { return g(y) * den.rho(y); };
  double acc = 0.0;
  auto run = [&](double a, double b) {
    if (!(b > a)) return;
    quad::Axis axis{a, b, {}};
    if (origin_singular && a <= 0.0 && b >= 0.0) axis.singular = {0.0};
    const auto v = quad::integrate_improper(f, axis, cfg);
    if (!v.finite()) {
      throw CutoffTooSmall("density moment over [" + std::to_string(a) + "," +
                           std::to_string(b) + "] did not converge");
    }
    acc += v.value;
  };
  if (lo < 0.0 && hi > 0.0) {
    run(lo, 0.0);
    run(0.0, hi);
  } else {
    run(lo, hi);
  }
  return acc;
}

}  // namespace

double BasisRealization::cell_value(int cell) const {
  double v = gaussian[cell] + drift[cell];
  for (const auto& j : jumps) {
    if (j.cell == cell) v += j.size;
  }
  return v;
}

double BasisRealization::total_mass() const {
  double v = 0.0;
  for (size_t i = 0; i < gaussian.size(); ++i) v += gaussian[i] + drift[i];
  for (const auto& j : jumps) v += j.size;
  return v;
}

BasisRealization simulate_levy_basis(const measure::CharacteristicTriplet& triplet,
                                     const GridSpec& grid, double eps,
                                     std::uint64_t seed, const SimOptions& opts) {
  if (triplet.gaussian.kind != measure::GaussianPart::Kind::Orthogonal) {
    throw std::invalid_argument("simulation requires an orthogonal triplet");
  }
  if (triplet.control.time.kind != measure::TimeControl::Kind::Lebesgue) {
    throw std::invalid_argument("simulation grids assume Lebesgue time");
  }
  if (grid.space.empty() || grid.n_steps < 1) {
    throw std::invalid_argument("simulation grid needs space cells and a step");
  }
  const auto& tau = triplet.tau;

  BasisRealization out;
  out.grid = grid;
  out.mode = opts.mode;
  out.eps = eps;
  out.seed = seed;
  const int n_cells = grid.n_cells();
  out.gaussian.assign(n_cells, 0.0);
  out.drift.assign(n_cells, 0.0);
  out.small_var.assign(n_cells, 0.0);
  out.small_bias.assign(n_cells, 0.0);

  struct CellPlan {
    double intensity = 0.0;      // restricted jump intensity per unit mass
    double atom_mass = 0.0;
    double density_mass = 0.0;
    double comp_large = 0.0;     // int_{|y|>eps} tau dnu (+ atoms)
    double small_var = 0.0;      // int_{|y|<=eps} y^2 dnu
    double small_shift = 0.0;    // int_{|y|<=eps} (y - tau(y)) dnu
    double small_bias = 0.0;     // int_{|y|<=eps} tau(y) dnu
    std::shared_ptr<DensitySampler> sampler;
    JumpMeasureSpec spec;
  };

  // The kernel may vary across cells, so moments and samplers are prepared
  // per cell before any randomness is drawn.
  std::vector<CellPlan> plans(n_cells);
  double expected_jumps = 0.0;
  for (int cell = 0; cell < n_cells; ++cell) {
    const int step = grid.step_of(cell);
    const int s = grid.space_of(cell);
    const double tc = 0.5 * (grid.step_lo(step) + grid.step_hi(step));
    CellPlan& plan = plans[cell];
    plan.spec = triplet.jumps(tc, grid.space[s].center);
    for (const auto& a : plan.spec.atoms) {
      if (std::abs(a.size) <= eps && plan.spec.density) {
        throw std::invalid_argument(
            "atom inside the small-jump cutoff while a density part is present");
      }
      plan.atom_mass += a.mass;
      plan.comp_large += tau(a.size) * a.mass;
    }
    if (plan.spec.density) {
      const auto& den = *plan.spec.density;
      if (eps <= 0.0) {
        throw CutoffTooSmall("density part requires a positive small-jump cutoff");
      }
      const double inf = std::numeric_limits<double>::infinity();
      plan.density_mass =
          density_integral(den, [](double) { return 1.0; }, eps, inf, opts.quad,
                           false) +
          density_integral(den, [](double) { return 1.0; }, -inf, -eps,
                           opts.quad, false);
      plan.comp_large +=
          density_integral(den, [&tau](double y) { return tau(y); }, eps, inf,
                           opts.quad, false) +
          density_integral(den, [&tau](double y) { return tau(y); }, -inf, -eps,
                           opts.quad, false);
      if (opts.mode == SmallJumpMode::DiffusionApprox) {
        plan.small_var = density_integral(
            den, [](double y) { return y * y; }, -eps, eps, opts.quad, true);
        plan.small_shift = density_integral(
            den, [&tau](double y) { return y - tau(y); }, -eps, eps, opts.quad,
            true);
      } else {
        plan.small_bias = density_integral(
            den, [&tau](double y) { return tau(y); }, -eps, eps, opts.quad, true);
      }
      plan.sampler = std::make_shared<DensitySampler>(den, eps, opts.quad);
    }
    plan.intensity = plan.atom_mass + plan.density_mass;
    expected_jumps += plan.intensity * grid.cell_mass(cell);
  }
  if (expected_jumps > opts.max_expected_jumps) {
    throw CutoffTooSmall("expected jump count " + std::to_string(expected_jumps) +
                         " exceeds the configured budget");
  }

  for (int cell = 0; cell < n_cells; ++cell) {
    const CellPlan& plan = plans[cell];
    const int step = grid.step_of(cell);
    const int s = grid.space_of(cell);
    const double m = grid.cell_mass(cell);
    const double tc = 0.5 * (grid.step_lo(step) + grid.step_hi(step));
    rng::CounterStream stream(seed, static_cast<std::uint64_t>(cell) + 1);

    double gvar = triplet.gaussian.c(tc, grid.space[s].center) * m;
    double drift_mass = triplet.drift(tc, grid.space[s].center) * m -
                        plan.comp_large * m;
    if (opts.mode == SmallJumpMode::DiffusionApprox) {
      gvar += plan.small_var * m;
      drift_mass += plan.small_shift * m;
      out.small_var[cell] = plan.small_var * m;
    } else {
      out.small_bias[cell] = plan.small_bias * m;
    }
    out.gaussian[cell] = gvar > 0.0 ? stream.normal() * std::sqrt(gvar) : 0.0;
    out.drift[cell] = drift_mass;

    const std::uint64_t count = stream.poisson(plan.intensity * m);
    for (std::uint64_t k = 0; k < count; ++k) {
      const double t = stream.uniform(grid.step_lo(step), grid.step_hi(step));
      double size = 0.0;
      double pick = stream.uniform() * plan.intensity;
      bool chosen = false;
      for (const auto& a : plan.spec.atoms) {
        if (pick < a.mass) {
          size = a.size;
          chosen = true;
          break;
        }
        pick -= a.mass;
      }
      if (!chosen) {
        size = plan.sampler ? plan.sampler->sample(stream.uniform())
                            : plan.spec.atoms.back().size;
      }
      out.jumps.push_back({t, cell, size});
    }
  }

  std::sort(out.jumps.begin(), out.jumps.end(),
            [](const Jump& a, const Jump& b) {
              return a.t < b.t || (a.t == b.t && a.cell < b.cell);
            });
  // Continuous sampling makes ties a measure-zero event; still, enforce
  // strictly increasing times after finite-precision rounding.
  for (size_t i = 1; i < out.jumps.size(); ++i) {
    if (out.jumps[i].t <= out.jumps[i - 1].t) {
      out.jumps[i].t = std::nextafter(out.jumps[i - 1].t,
                                      std::numeric_limits<double>::infinity());
    }
  }
  return out;
}

namespace {

int aligned_step(const GridSpec& grid, double t, const char* which) {
  const double raw = (t - grid.t0) / grid.dt();
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 1e-9 * std::max(1.0, std::abs(raw))) {
    throw RegionNotAligned(std::string("region ") + which +
                           " boundary splits a grid cell");
  }
  return static_cast<int>(rounded);
}

}  // namespace

double region_mass(const BasisRealization& real, const GridRegion& region) {
  const auto& grid = real.grid;
  const int k0 = aligned_step(grid, region.t0, "lower");
  const int k1 = aligned_step(grid, region.t1, "upper");
  if (k0 < 0 || k1 > grid.n_steps || k1 < k0) {
    throw RegionNotAligned("region outside the simulated window");
  }
  auto in_space = [&](int space_id) {
    if (region.space_ids.empty()) return true;
    return std::find(region.space_ids.begin(), region.space_ids.end(),
                     space_id) != region.space_ids.end();
  };
  double acc = 0.0;
  for (int step = k0; step < k1; ++step) {
    for (size_t s = 0; s < grid.space.size(); ++s) {
      if (!in_space(static_cast<int>(s))) continue;
      const int cell = grid.cell_index(step, static_cast<int>(s));
      acc += real.gaussian[cell] + real.drift[cell];
    }
  }
  for (const auto& j : real.jumps) {
    const int step = grid.step_of(j.cell);
    if (step >= k0 && step < k1 && in_space(grid.space_of(j.cell))) {
      acc += j.size;
    }
  }
  return acc;
}

CfEstimate empirical_cf(const std::vector<BasisRealization>& realizations,
                        const GridRegion& region, double u) {
  CfEstimate out;
  const size_t n = realizations.size();
  if (n == 0) return out;
  double sum_re = 0.0, sum_im = 0.0, sq_re = 0.0, sq_im = 0.0;
  for (const auto& real : realizations) {
    const double m = region_mass(real, region);
    const double re = std::cos(u * m);
    const double im = std::sin(u * m);
    sum_re += re;
    sum_im += im;
    sq_re += re * re;
    sq_im += im * im;
  }
  const double nn = static_cast<double>(n);
  out.mean = {sum_re / nn, sum_im / nn};
  if (n > 1) {
    const double var_re = std::max(0.0, (sq_re - sum_re * sum_re / nn) / (nn - 1.0));
    const double var_im = std::max(0.0, (sq_im - sum_im * sum_im / nn) / (nn - 1.0));
    out.se_re = std::sqrt(var_re / nn);
    out.se_im = std::sqrt(var_im / nn);
  }
  return out;
}

std::string cells_csv(const BasisRealization& real) {
  std::string out = "cell_id,t0,t1,space_id,gaussian,drift\n";
  for (int cell = 0; cell < real.grid.n_cells(); ++cell) {
    const int step = real.grid.step_of(cell);
    out += fmt_row("%d,%.17g,%.17g,%d,%.17g,%.17g\n", cell,
                   real.grid.step_lo(step), real.grid.step_hi(step),
                   real.grid.space_of(cell), real.gaussian[cell],
                   real.drift[cell]);
  }
  return out;
}

std::string jumps_csv(const BasisRealization& real) {
  std::string out = "t,cell_id,size\n";
  for (const auto& j : real.jumps) {
    out += fmt_row("%.17g,%d,%.17g\n", j.t, j.cell, j.size);
  }
  return out;
}

DensitySamplerHandle build_density_sampler(const measure::JumpDensity& den,
                                           double eps,
                                           const quad::QuadConfig& cfg) {
  auto sampler = std::make_shared<DensitySampler>(den, eps, cfg);
  DensitySamplerHandle out;
  out.total_mass = sampler->total();
  out.inv_cdf = [sampler](double u) { return sampler->sample(u); };
  return out;
}

}  // namespace ambit::sim
