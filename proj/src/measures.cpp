#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "ambit/control_measure.hpp"
#include "ambit/jump_measure.hpp"
#include "ambit/triplet.hpp"

namespace ambit::measure {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sin(w) - w without cancellation for small |w|.
double sin_minus_arg(double w) {
  if (std::abs(w) < 1e-3) {
    const double w2 = w * w;
    return -(w * w2) / 6.0 * (1.0 - w2 / 20.0 * (1.0 - w2 / 42.0));
  }
  return std::sin(w) - w;
}

quad::Verdict combine(const quad::Verdict& a, const quad::Verdict& b) {
  if (a.infinite() || b.infinite()) {
    const auto& inf = a.infinite() ? a : b;
    return quad::Verdict::infinite_growth(inf.slope, inf.reason);
  }
  if (a.inconclusive() || b.inconclusive()) {
    return quad::Verdict::undecided(a.inconclusive() ? a.reason : b.reason);
  }
  return quad::Verdict::finite_value(a.value + b.value, a.err + b.err);
}

}  // namespace

std::string TruncationFunction::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Standard: os << "standard(" << bound << ")"; break;
    case Kind::Zero: os << "zero"; break;
    case Kind::Custom: os << "custom(bound=" << bound << ")"; break;
  }
  return os.str();
}

quad::Verdict integrate_jump(const std::function<double(double)>& g,
                             const JumpMeasureSpec& spec,
                             const quad::QuadConfig& cfg) {
  double atom_sum = 0.0;
  for (const auto& a : spec.atoms) atom_sum += g(a.size) * a.mass;
  quad::Verdict out = quad::Verdict::finite_value(atom_sum, 0.0);
  if (!spec.density) return out;

  const auto& den = *spec.density;
  const quad::Fn1 integrand = [&](double y) { return g(y) * den.rho(y); };
  const double lo = den.support_lo;
  const double hi = den.support_hi;
  auto piece = [&](double a, double b) -> quad::Verdict {
    quad::Axis axis{a, b, {}};
    if (a <= 0.0 && b >= 0.0) axis.singular = {0.0};
    return quad::integrate_improper(integrand, axis, cfg);
  };
  if (lo < 0.0 && hi > 0.0) {
    out = combine(out, piece(lo, 0.0));
    out = combine(out, piece(0.0, hi));
  } else if (hi > lo) {
    out = combine(out, piece(lo, hi));
  }
  return out;
}

quad::Verdict ControlMeasure::integrate(
    const std::function<double(double, std::span<const double>)>& F,
    const quad::QuadConfig& cfg,
    std::span<const double> time_singularities) const {
  quad::Axis time_axis{time.t0, time.t1, {}};
  for (double s : time_singularities) {
    if (s >= time.t0 && s <= time.t1) time_axis.singular.push_back(s);
  }
  const auto tdens = [this](double t) {
    return time.kind == TimeControl::Kind::Density ? time.density(t) : 1.0;
  };

  if (space.kind == SpaceControl::Kind::LebesgueBox) {
    std::vector<quad::Axis> axes;
    axes.push_back(time_axis);
    for (const auto& [lo, hi] : space.box) axes.push_back(quad::Axis{lo, hi, {}});
    const quad::FnN f = [&](std::span<const double> pt) {
      return F(pt[0], pt.subspan(1)) * tdens(pt[0]);
    };
    return quad::integrate_improper(f, axes, cfg);
  }

  const quad::Fn1 g = [&](double t) {
    double acc = 0.0;
    for (const auto& cell : space.cells) {
      acc += cell.weight * F(t, cell.center);
    }
    return acc * tdens(t);
  };
  return quad::integrate_improper(g, time_axis, cfg);
}

double ControlMeasure::mass(double a, double b) const {
  double sw = 0.0;
  if (space.kind == SpaceControl::Kind::LebesgueBox) {
    sw = 1.0;
    for (const auto& [lo, hi] : space.box) sw *= (hi - lo);
  } else {
    sw = space.total_weight();
  }
  if (std::isinf(b) || std::isinf(a)) return kInf;
  double tm = 0.0;
  if (time.kind == TimeControl::Kind::Lebesgue) {
    tm = std::max(0.0, b - a);
  } else {
    auto v = quad::integrate_improper(time.density, quad::Axis{a, b, {}});
    tm = v.finite() ? v.value : kInf;
  }
  return tm * sw;
}

namespace {

std::vector<double> sample_times(const ControlMeasure& control, int n) {
  const double t0 = control.time.t0;
  const double t1 = std::isinf(control.time.t1) ? control.time.t0 + 8.0
                                                : control.time.t1;
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(t0 + (t1 - t0) * (i + 0.5) / n);
  }
  return out;
}

std::vector<std::vector<double>> sample_points(const SpaceControl& space) {
  std::vector<std::vector<double>> out;
  if (space.kind == SpaceControl::Kind::LebesgueBox) {
    std::vector<double> center;
    for (const auto& [lo, hi] : space.box) center.push_back(0.5 * (lo + hi));
    out.push_back(center);
    for (size_t i = 0; i < space.box.size(); ++i) {
      auto lo_pt = center, hi_pt = center;
      lo_pt[i] = space.box[i].first + 0.01 * (space.box[i].second - space.box[i].first);
      hi_pt[i] = space.box[i].second - 0.01 * (space.box[i].second - space.box[i].first);
      out.push_back(lo_pt);
      out.push_back(hi_pt);
    }
  } else {
    for (const auto& cell : space.cells) out.push_back(cell.center);
  }
  return out;
}

std::string point_str(double t, std::span<const double> x) {
  std::ostringstream os;
  os << "(t=" << t << ", x=";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

std::vector<std::string> validate_triplet(const CharacteristicTriplet& triplet,
                                          const quad::QuadConfig& cfg,
                                          int samples_per_axis) {
  std::vector<std::string> violations;
  const auto times = sample_times(triplet.control, samples_per_axis);
  const auto points = sample_points(triplet.control.space);

  // Truncation function shape.
  const auto& tau = triplet.tau;
  if (!tau.is_zero()) {
    if (tau(0.0) != 0.0) violations.push_back("truncation: tau(0) != 0");
    for (int i = 1; i <= samples_per_axis; ++i) {
      const double y = tau.bound * 3.0 * i / samples_per_axis;
      for (double s : {y, -y}) {
        if (std::abs(tau(s)) > tau.bound * (1.0 + 1e-12)) {
          std::ostringstream os;
          os << "truncation: |tau(" << s << ")| exceeds bound " << tau.bound;
          violations.push_back(os.str());
        }
      }
      const double z = 0.5 * tau.bound * i / (samples_per_axis + 1);
      for (double s : {z, -z}) {
        if (tau(s) != s) {
          std::ostringstream os;
          os << "truncation: tau(y) != y at y=" << s
             << " inside the identity neighbourhood";
          violations.push_back(os.str());
        }
      }
    }
  }

  // Control measure.
  if (!(triplet.control.time.t1 > triplet.control.time.t0)) {
    violations.push_back("control: empty time window");
  }
  if (triplet.control.time.kind == TimeControl::Kind::Density) {
    for (double t : times) {
      if (triplet.control.time.density(t) < 0.0) {
        violations.push_back("control: negative time density at t=" + std::to_string(t));
      }
    }
  }
  for (const auto& cell : triplet.control.space.cells) {
    if (cell.weight < 0.0) {
      violations.push_back("control: negative space weight on cell " +
                           std::to_string(cell.id));
    }
  }

  // Gaussian part.
  if (triplet.gaussian.kind == GaussianPart::Kind::Colored) {
    if (triplet.flags.orthogonal) {
      violations.push_back("gaussian: colored covariance requires flags.orthogonal=false");
    }
    for (int i = 1; i <= samples_per_axis; ++i) {
      const double z = 4.0 * i / samples_per_axis;
      const double fp = triplet.gaussian.f(z);
      const double fm = triplet.gaussian.f(-z);
      if (std::abs(fp - fm) > 1e-10 * std::max(1.0, std::abs(fp))) {
        violations.push_back("gaussian: covariance kernel not symmetric at z=" +
                             std::to_string(z));
      }
      if (fp < 0.0) {
        violations.push_back("gaussian: covariance kernel negative at z=" +
                             std::to_string(z));
      }
    }
  } else {
    for (double t : times) {
      for (const auto& x : points) {
        if (triplet.gaussian.c(t, x) < 0.0) {
          violations.push_back("gaussian: c < 0 at " + point_str(t, x));
        }
      }
    }
  }

  // Jump kernel.
  const auto levy_g = [](double y) { return std::min(1.0, y * y); };
  for (double t : times) {
    for (const auto& x : points) {
      const JumpMeasureSpec spec = triplet.jumps(t, x);
      for (const auto& a : spec.atoms) {
        if (a.size == 0.0) {
          violations.push_back("jump kernel: atom at zero " + point_str(t, x));
        }
        if (!(a.mass > 0.0)) {
          violations.push_back("jump kernel: nonpositive atom mass " + point_str(t, x));
        }
      }
      if (!spec.is_zero()) {
        const auto v = integrate_jump(levy_g, spec, cfg);
        if (v.infinite()) {
          violations.push_back("jump kernel: integral of (1 ^ y^2) d nu diverges " +
                               point_str(t, x));
        } else if (v.inconclusive()) {
          violations.push_back(
              "jump kernel: integral of (1 ^ y^2) d nu not certifiable (" + v.reason +
              ") " + point_str(t, x));
        }
      }
      if (spec.density && spec.density->rho) {
        for (int i = 1; i <= 3; ++i) {
          const double y = 0.9 * i / 3.0 *
                           (std::isfinite(spec.density->support_hi)
                                ? spec.density->support_hi
                                : 1.0);
          if (y != 0.0 && spec.density->rho(y) < 0.0) {
            violations.push_back("jump kernel: negative density at y=" +
                                 std::to_string(y) + " " + point_str(t, x));
          }
        }
      }
    }
  }
  return violations;
}

std::complex<double> jump_cf_term(double u, double y,
                                  const TruncationFunction& tau) {
  const double w = u * y;
  const double s = std::sin(0.5 * w);
  const double re = -2.0 * s * s;
  const double ty = tau(y);
  const double im = (ty == y) ? sin_minus_arg(w) : std::sin(w) - u * ty;
  return {re, im};
}

std::complex<double> levy_khintchine_exponent(
    const CharacteristicTriplet& triplet, const Region& region, double u,
    const quad::QuadConfig& cfg) {
  if (triplet.gaussian.kind == GaussianPart::Kind::Colored) {
    throw ColoredUnsupported(
        "Levy-Khintchine exponent per region is defined for orthogonal triplets only");
  }
  ControlMeasure sub = triplet.control;
  sub.time.t0 = std::max(sub.time.t0, region.t0);
  sub.time.t1 = std::min(sub.time.t1, region.t1);
  if (!region.cell_ids.empty() &&
      sub.space.kind != SpaceControl::Kind::LebesgueBox) {
    std::vector<SpaceCell> kept;
    for (const auto& cell : sub.space.cells) {
      if (std::find(region.cell_ids.begin(), region.cell_ids.end(), cell.id) !=
          region.cell_ids.end()) {
        kept.push_back(cell);
      }
    }
    sub.space.cells = std::move(kept);
  }
  if (!std::isfinite(sub.mass(sub.time.t0, sub.time.t1))) {
    throw NonFiniteRegion("region has infinite A-mass");
  }
  if (!(sub.time.t1 > sub.time.t0)) return {0.0, 0.0};

  const quad::QuadConfig jcfg = cfg.inner();
  auto part = [&](bool real_part) {
    return sub.integrate(
        [&](double t, std::span<const double> x) -> double {
          const JumpMeasureSpec spec = triplet.jumps(t, x);
          double acc = 0.0;
          if (real_part) {
            acc = -0.5 * u * u * triplet.gaussian.c(t, x);
          } else {
            acc = u * triplet.drift(t, x);
          }
          if (!spec.is_zero()) {
            const auto g = [&](double y) {
              const auto z = jump_cf_term(u, y, triplet.tau);
              return real_part ? z.real() : z.imag();
            };
            const auto v = integrate_jump(g, spec, jcfg);
            if (!v.finite()) {
              throw quad::EvaluationError(
                  "jump part of the Levy-Khintchine exponent did not converge", {t});
            }
            acc += v.value;
          }
          return acc;
        },
        cfg);
  };
  const auto re = part(true);
  const auto im = part(false);
  if (!re.finite() || !im.finite()) {
    throw quad::EvaluationError("Levy-Khintchine exponent integral did not converge",
                                {});
  }
  return {re.value, im.value};
}

CharacteristicTriplet retruncate(const CharacteristicTriplet& triplet,
                                 const TruncationFunction& tau2,
                                 const quad::QuadConfig& cfg) {
  CharacteristicTriplet out = triplet;
  const TruncationFunction tau1 = triplet.tau;
  const JumpKernelFn jumps = triplet.jumps;
  const TimeSpaceFn drift = triplet.drift;
  const quad::QuadConfig jcfg = cfg;
  out.drift = [jumps, drift, tau1, tau2, jcfg](
                  double t, std::span<const double> x) -> double {
    const JumpMeasureSpec spec = jumps(t, x);
    if (spec.is_zero()) return drift(t, x);
    const auto g = [&](double y) { return tau2(y) - tau1(y); };
    const auto v = integrate_jump(g, spec, jcfg);
    if (!v.finite()) {
      throw RetruncationDivergent(
          "compensation integral for the new truncation function does not converge");
    }
    return drift(t, x) + v.value;
  };
  out.tau = tau2;
  return out;
}

}  // namespace ambit::measure
