#include "ambit/integrability.hpp"

#include <algorithm>
#include <cmath>

namespace ambit::integrability {

namespace {

// |a b(t,x) + int (tau(a y) - a tau(y)) K(t,x,dy)|
double drift_scale(double t, std::span<const double> x, double a,
                   const CharacteristicTriplet& triplet,
                   const TruncationFunction& tau, const quad::QuadConfig& cfg) {
  double acc = a * triplet.drift(t, x);
  const auto spec = triplet.jumps(t, x);
  if (!spec.is_zero() && !tau.is_zero()) {
    const auto g = [&](double y) { return tau(a * y) - a * tau(y); };
    const auto v = integrate_jump(g, spec, cfg);
    if (!v.finite()) {
      throw quad::EvaluationError("drift compensation integral did not converge",
                                  {t, a});
    }
    acc += v.value;
  }
  return std::abs(acc);
}

}  // namespace

DriftScaleBounds drift_scale_bounds(double t, std::span<const double> x, double a,
                                    const CharacteristicTriplet& triplet,
                                    const TruncationFunction& tau,
                                    const quad::QuadConfig& cfg,
                                    int grid_points) {
  DriftScaleBounds out;
  out.at_scale = drift_scale(t, x, a, triplet, tau, cfg);
  if (a == 0.0) return out;

  // Maximise over rescalings c in [-1,1] on a grid, then refine once around
  // the argmax. The objective is even in c for symmetric tau but we do not
  // assume that.
  const int n = std::max(grid_points, 3);
  double best = 0.0;
  double best_c = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = -1.0 + 2.0 * i / (n - 1);
    const double u = drift_scale(t, x, c * a, triplet, tau, cfg);
    if (u > best) {
      best = u;
      best_c = c;
    }
  }
  const double step = 2.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double c = std::clamp(best_c - step + 2.0 * step * i / (n - 1), -1.0, 1.0);
    best = std::max(best, drift_scale(t, x, c * a, triplet, tau, cfg));
  }
  out.sup_rescaled = std::max(best, out.at_scale);
  return out;
}

quad::Verdict check_condition_drift(const IntegrandSpec& H,
                                    const CharacteristicTriplet& triplet,
                                    const TruncationFunction& tau,
                                    const quad::QuadConfig& cfg) {
  const quad::QuadConfig jcfg = cfg.inner();
  quad::QuadConfig ocfg = cfg;
  ocfg.nonneg = true;
  return triplet.control.integrate(
      [&](double t, std::span<const double> x) {
        return drift_scale(t, x, H.effective(t, x), triplet, tau, jcfg);
      },
      ocfg, H.time_singularities);
}

quad::Verdict check_condition_gaussian(const IntegrandSpec& H,
                                       const CharacteristicTriplet& triplet,
                                       const quad::QuadConfig& cfg) {
  if (triplet.gaussian.kind == measure::GaussianPart::Kind::Colored) {
    return check_condition_gaussian_colored(H, triplet, cfg).l0;
  }
  quad::QuadConfig ocfg = cfg;
  ocfg.nonneg = true;
  return triplet.control.integrate(
      [&](double t, std::span<const double> x) {
        const double h = H.effective(t, x);
        return h * h * triplet.gaussian.c(t, x);
      },
      ocfg, H.time_singularities);
}

quad::Verdict colored_l0_verdict(const std::function<double(double, double)>& h,
                                 const quad::Fn1& f, const quad::Axis& time_axis,
                                 double space_lo, double space_hi,
                                 const quad::QuadConfig& cfg) {
  const quad::QuadConfig icfg = cfg.inner();
  auto inner_pair = [&](double t) -> std::pair<double, double> {
    // A cancelling integral can only be resolved down to machine noise on
    // the scale of the |H| mass, so the signed pass runs with an absolute
    // floor proportional to the absolute pass.
    auto one = [&](bool absolute, double scale) {
      quad::QuadConfig c_out = icfg;
      quad::QuadConfig c_in = icfg.inner();
      if (!absolute) {
        c_out.abs_tol = std::max(c_out.abs_tol, 1e-12 * scale);
        c_in.abs_tol = std::max(c_in.abs_tol, 1e-12 * scale);
      }
      const quad::Fn1 over_x = [&](double x) {
        const quad::Fn1 over_xp = [&](double xp) {
          const double prod = h(t, x) * h(t, xp) * f(x - xp);
          return absolute ? std::abs(h(t, x) * h(t, xp)) * f(x - xp) : prod;
        };
        const auto v = quad::integrate_improper(
            over_xp, quad::Axis{space_lo, space_hi}, c_in);
        if (!v.finite()) {
          throw quad::EvaluationError("inner spatial integral not finite", {t, x});
        }
        return v.value;
      };
      return quad::integrate_improper(over_x, quad::Axis{space_lo, space_hi},
                                      c_out);
    };
    const auto va = one(true, 0.0);
    if (!va.finite()) {
      throw quad::EvaluationError("inner spatial integral not finite", {t});
    }
    const auto vs = one(false, std::abs(va.value));
    if (!vs.finite()) {
      throw quad::EvaluationError("inner spatial integral not finite", {t});
    }
    return {vs.value, va.value};
  };

  const double t_hi = std::isinf(time_axis.hi) ? time_axis.lo + 8.0 : time_axis.hi;
  bool all_vanish = true;
  try {
    for (int i = 0; i < 5; ++i) {
      const double t = time_axis.lo + (t_hi - time_axis.lo) * (i + 0.5) / 5.0;
      const auto [signed_part, abs_part] = inner_pair(t);
      if (std::abs(signed_part) >
          std::max(cfg.abs_tol, 1e-9 * std::max(1.0, std::abs(abs_part)))) {
        all_vanish = false;
        break;
      }
    }
  } catch (const quad::EvaluationError& e) {
    return quad::Verdict::undecided(std::string("inner spatial integral failed: ") +
                                    e.what());
  }
  if (all_vanish) {
    auto v = quad::Verdict::finite_value(0.0, cfg.rel_tol);
    v.reason = "inner spatial integral vanishes at sampled times";
    return v;
  }
  return quad::bimeasure_integral(h, h, f, time_axis, space_lo, space_hi, cfg);
}

ColoredGaussianVerdicts check_condition_gaussian_colored(
    const IntegrandSpec& H, const CharacteristicTriplet& triplet,
    const quad::QuadConfig& cfg) {
  if (triplet.gaussian.kind != measure::GaussianPart::Kind::Colored) {
    throw std::invalid_argument("triplet does not carry a colored gaussian part");
  }
  const auto& space = triplet.control.space;
  if (space.kind != measure::SpaceControl::Kind::LebesgueBox ||
      space.box.size() != 1) {
    throw std::invalid_argument(
        "colored gaussian condition needs a 1-d Lebesgue space box");
  }
  const double lo = space.box[0].first;
  const double hi = space.box[0].second;
  quad::Axis time_axis{triplet.control.time.t0, triplet.control.time.t1,
                       H.time_singularities};
  const auto h = [&H](double t, double x) {
    const std::array<double, 1> pt{x};
    return H.effective(t, std::span<const double>(pt));
  };
  const auto habs = [h](double t, double x) { return std::abs(h(t, x)); };
  const auto& f = triplet.gaussian.f;

  ColoredGaussianVerdicts out;
  out.l0 = colored_l0_verdict(h, f, time_axis, lo, hi, cfg);
  quad::QuadConfig scfg = cfg;
  scfg.nonneg = true;
  out.strict = quad::bimeasure_integral(habs, habs, f, time_axis, lo, hi, scfg);
  return out;
}

quad::Verdict check_condition_jump(const IntegrandSpec& H,
                                   const CharacteristicTriplet& triplet,
                                   const quad::QuadConfig& cfg) {
  const quad::QuadConfig jcfg = cfg.inner();
  quad::QuadConfig ocfg = cfg;
  ocfg.nonneg = true;
  return triplet.control.integrate(
      [&](double t, std::span<const double> x) {
        const auto spec = triplet.jumps(t, x);
        if (spec.is_zero()) return 0.0;
        const double h = H.effective(t, x);
        const auto g = [h](double y) {
          const double z = h * y;
          return std::min(1.0, z * z);
        };
        const auto v = integrate_jump(g, spec, jcfg);
        if (!v.finite()) {
          throw quad::EvaluationError("inner jump integral did not converge", {t});
        }
        return v.value;
      },
      ocfg, H.time_singularities);
}

namespace {

quad::Verdict check_condition_jump_var(const IntegrandSpec& H,
                                       const CharacteristicTriplet& triplet,
                                       const quad::QuadConfig& cfg) {
  const quad::QuadConfig jcfg = cfg.inner();
  quad::QuadConfig ocfg = cfg;
  ocfg.nonneg = true;
  return triplet.control.integrate(
      [&](double t, std::span<const double> x) {
        const auto spec = triplet.jumps(t, x);
        if (spec.is_zero()) return 0.0;
        const double h = H.effective(t, x);
        const auto g = [h](double y) { return std::min(1.0, std::abs(h * y)); };
        const auto v = integrate_jump(g, spec, jcfg);
        if (!v.finite()) {
          throw quad::EvaluationError("inner jump integral did not converge", {t});
        }
        return v.value;
      },
      ocfg, H.time_singularities);
}

bool summable_jumps(const CharacteristicTriplet& triplet,
                    const quad::QuadConfig& cfg) {
  // Sampled check that int (1 ^ |y|) d nu is finite, the declared-intent
  // prerequisite for working with tau = 0.
  const auto g = [](double y) { return std::min(1.0, std::abs(y)); };
  const double t0 = triplet.control.time.t0;
  const double t1 = std::isinf(triplet.control.time.t1)
                        ? t0 + 4.0
                        : triplet.control.time.t1;
  for (int i = 0; i < 3; ++i) {
    const double t = t0 + (t1 - t0) * (i + 0.5) / 3.0;
    std::vector<std::span<const double>> points;
    static const double origin[1] = {0.0};
    if (triplet.control.space.kind == measure::SpaceControl::Kind::LebesgueBox) {
      points.emplace_back(origin, 1);
    } else {
      for (const auto& cell : triplet.control.space.cells) {
        points.emplace_back(cell.center.data(), cell.center.size());
      }
    }
    for (const auto& x : points) {
      const auto spec = triplet.jumps(t, x);
      if (spec.is_zero()) continue;
      if (!integrate_jump(g, spec, cfg).finite()) return false;
    }
  }
  return true;
}

}  // namespace

const char* to_string(Conjunction c) {
  switch (c) {
    case Conjunction::Integrable: return "Integrable";
    case Conjunction::NotIntegrable: return "NotIntegrable";
    case Conjunction::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::ProperTau: return "proper_tau";
    case Variant::TauZeroSufficient: return "tau_zero_sufficient";
    case Variant::TauZeroPositiveMeasure: return "tau_zero_positive_measure";
  }
  return "?";
}

IntegrabilityReport check_integrable(const IntegrandSpec& H,
                                     const CharacteristicTriplet& triplet,
                                     const TruncationFunction& tau,
                                     const quad::QuadConfig& cfg) {
  IntegrabilityReport report;
  report.tau_used = tau;

  CharacteristicTriplet working = triplet;
  if (tau.kind != triplet.tau.kind || tau.bound != triplet.tau.bound) {
    working = measure::retruncate(triplet, tau, cfg);
  }

  const bool signed_flag = triplet.flags.sign != 0;
  if (tau.is_zero()) {
    report.variant = signed_flag ? Variant::TauZeroPositiveMeasure
                                 : Variant::TauZeroSufficient;
    if (!signed_flag && !summable_jumps(working, cfg)) {
      throw ImproperTauMisuse(
          "tau = 0 on a triplet without summable jumps and no positivity flag");
    }
  } else {
    report.variant = Variant::ProperTau;
  }

  report.cond1 = check_condition_drift(H, working, tau, cfg);
  if (working.gaussian.kind == measure::GaussianPart::Kind::Colored) {
    const auto pair = check_condition_gaussian_colored(H, working, cfg);
    report.cond2 = pair.l0;
    report.cond2_strict = pair.strict;
  } else {
    report.cond2 = check_condition_gaussian(H, working, cfg);
  }
  report.cond3 = tau.is_zero() ? check_condition_jump_var(H, working, cfg)
                               : check_condition_jump(H, working, cfg);

  const bool all_finite =
      report.cond1.finite() && report.cond2.finite() && report.cond3.finite();
  const bool any_infinite = report.cond1.infinite() ||
                            report.cond2.infinite() || report.cond3.infinite();
  if (all_finite) {
    report.conjunction = Conjunction::Integrable;
  } else if (any_infinite) {
    // Under tau = 0 the conditions are sufficient only; a failed condition
    // disproves membership only for positive or negative random measures.
    if (report.variant == Variant::TauZeroSufficient) {
      report.conjunction = Conjunction::Inconclusive;
    } else {
      report.conjunction = Conjunction::NotIntegrable;
    }
  } else {
    report.conjunction = Conjunction::Inconclusive;
  }
  return report;
}

double integrable_fraction(const IntegrandSpec& H,
                           const CharacteristicTriplet& triplet,
                           const TruncationFunction& tau,
                           std::span<const measure::TimeSpaceFn> sigma_paths,
                           const quad::QuadConfig& cfg) {
  if (sigma_paths.empty()) return 0.0;
  int hits = 0;
  for (const auto& sigma : sigma_paths) {
    IntegrandSpec mod = H;
    mod.sigma = sigma;
    const auto report = check_integrable(mod, triplet, tau, cfg);
    if (report.conjunction == Conjunction::Integrable) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(sigma_paths.size());
}

}  // namespace ambit::integrability
