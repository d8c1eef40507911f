#include "ambit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace ambit::quad {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Finite: return "Finite";
    case Outcome::Infinite: return "Infinite";
    case Outcome::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss7/Kronrod15 node, Gauss weight, Kronrod weight.
constexpr double kG7K15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

struct Panel {
  double a, b;
  double value;
  double err;
};

double eval_checked(const Fn1& f, double x) {
  const double y = f(x);
  if (std::isnan(y)) {
    throw EvaluationError("integrand returned NaN", {x});
  }
  return y;
}

Panel g7k15(const Fn1& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> fv{};
  fv[0] = eval_checked(f, mid);
  double g7 = kG7K15[0][1] * fv[0];
  double k15 = kG7K15[0][2] * fv[0];
  double resabs = kG7K15[0][2] * std::abs(fv[0]);
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kG7K15[i][0];
    const double yp = eval_checked(f, mid + dx);
    const double ym = eval_checked(f, mid - dx);
    fv[2 * i - 1] = yp;
    fv[2 * i] = ym;
    g7 += kG7K15[i][1] * (yp + ym);
    k15 += kG7K15[i][2] * (yp + ym);
    resabs += kG7K15[i][2] * (std::abs(yp) + std::abs(ym));
  }
  // QUADPACK-style scale-invariant error estimate.
  const double mean = 0.5 * k15;
  double resasc = kG7K15[0][2] * std::abs(fv[0] - mean);
  for (int i = 1; i < 8; ++i) {
    resasc += kG7K15[i][2] *
              (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  }
  g7 *= half;
  k15 *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs(k15 - g7);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50) {
    err = std::max(eps50 * resabs, err);
  }
  return Panel{a, b, k15, err};
}

struct SegmentResult {
  double value = 0.0;
  double err = 0.0;
  bool converged = true;
};

// Worst-panel-first bisection on a proper segment. Deterministic: ties are
// broken by the left endpoint.
SegmentResult adaptive(const Fn1& f, double a, double b, double rel_tol,
                       double abs_tol, int budget) {
  SegmentResult out;
  if (!(b > a)) return out;
  std::vector<Panel> panels;
  panels.push_back(g7k15(f, a, b));
  double total_v = panels[0].value;
  double total_e = panels[0].err;
  while (static_cast<int>(panels.size()) < budget) {
    if (total_e <= std::max(abs_tol, rel_tol * std::abs(total_v))) break;
    size_t worst = 0;
    for (size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].err > panels[worst].err ||
          (panels[i].err == panels[worst].err &&
           panels[i].a < panels[worst].a)) {
        worst = i;
      }
    }
    Panel p = panels[worst];
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) break;  // interval exhausted at double precision
    Panel left = g7k15(f, p.a, m);
    Panel right = g7k15(f, m, p.b);
    total_v += left.value + right.value - p.value;
    total_e += left.err + right.err - p.err;
    panels[worst] = left;
    panels.push_back(right);
  }
  // Recompute sums in a fixed order to keep results independent of the
  // split history roundoff.
  std::sort(panels.begin(), panels.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  total_v = 0.0;
  total_e = 0.0;
  for (const Panel& p : panels) {
    total_v += p.value;
    total_e += p.err;
  }
  out.value = total_v;
  out.err = total_e;
  out.converged = total_e <= std::max(abs_tol, rel_tol * std::abs(total_v));
  return out;
}

enum class FeatureState { Converged, Divergent, Stuck };

// Outcome of analysing the geometric shell sequence of one improper feature
// (an unbounded tail or an approach to a declared singularity).
struct FeatureResult {
  FeatureState state = FeatureState::Converged;
  double sum = 0.0;        // shells actually integrated
  double err = 0.0;        // their quadrature error
  double remainder = 0.0;  // geometric-ratio extrapolation beyond the ladder
  double remainder_err = 0.0;
  double slope = 0.0;  // fitted log-log growth exponent when divergent
  std::string note;
};

double fit_slope(std::span<const double> logx, std::span<const double> logy) {
  const size_t n = logx.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += logx[i];
    my += logy[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (logx[i] - mx) * (logx[i] - mx);
    sxy += (logx[i] - mx) * (logy[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

// shells[k] is the integral over the k-th ladder shell, ordered toward the
// feature; coord[k] is the matching approach coordinate (radius for tails,
// reciprocal offset for singularities), strictly increasing.
FeatureResult analyse_feature(const std::vector<double>& shells,
                              const std::vector<double>& shell_errs,
                              const std::vector<bool>& shell_ok,
                              const std::vector<double>& coord, double scale,
                              const QuadConfig& cfg, const char* what) {
  FeatureResult out;
  const int n = static_cast<int>(shells.size());
  for (int i = 0; i < n; ++i) {
    out.sum += shells[i];
    out.err += shell_errs[i];
  }
  if (n == 0) return out;
  const int w = std::min(cfg.divergence_window, n);

  // Negligible trailing shells: the feature has died out inside the ladder.
  double tail_abs = 0.0;
  bool tail_quad_ok = true;
  for (int i = n - w; i < n; ++i) {
    tail_abs += std::abs(shells[i]);
    tail_quad_ok = tail_quad_ok && shell_ok[i];
  }
  const double tiny = std::max(cfg.abs_tol, 0.01 * cfg.rel_tol * std::max(1.0, scale));
  if (tail_abs <= tiny) {
    out.remainder = 0.0;
    out.remainder_err = tail_abs;
    return out;
  }

  // Geometric decay: extrapolate the remainder from the shell ratios. The
  // last ratio is the most converged; the geometric-mean ratio over the
  // window probes the drift, and their disagreement prices the
  // extrapolation error.
  bool ratios_valid = n >= w + 1 && tail_quad_ok;
  double r_lo = kInf, r_hi = -kInf;
  for (int i = n - w; ratios_valid && i < n; ++i) {
    const double prev = shells[i - 1];
    const double cur = shells[i];
    if (prev == 0.0 || (prev > 0.0) != (cur > 0.0)) {
      ratios_valid = false;
      break;
    }
    const double r = cur / prev;
    r_lo = std::min(r_lo, r);
    r_hi = std::max(r_hi, r);
  }
  if (ratios_valid && r_lo > 0.0 && r_hi < 0.9995) {
    const double last = shells[n - 1];
    const double r_last = last / shells[n - 2];
    const double r_fit =
        std::pow(std::abs(last / shells[n - 1 - w]), 1.0 / w);
    auto tail_of = [&](double r) { return last * r / (1.0 - r); };
    out.remainder = tail_of(r_last);
    double quad_err = 0.0;
    for (int i = n - w; i < n; ++i) quad_err += shell_errs[i];
    out.remainder_err = 2.0 * std::abs(tail_of(r_last) - tail_of(r_fit)) +
                        2.0 * quad_err / (1.0 - r_hi);
    return out;
  }

  // Divergence: cumulative truncated integrals increasing with a log-log
  // slope above the configured threshold across the last rungs.
  if (n >= w + 1) {
    std::vector<double> cum(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += shells[i];
      cum[i] = acc;
    }
    const double sign = cum[n - 1] >= 0.0 ? 1.0 : -1.0;
    bool monotone = true;
    std::vector<double> lx, ly;
    for (int i = n - 1 - w; i < n; ++i) {
      const double v = sign * cum[i];
      if (!(v > 0.0)) monotone = false;
      if (i > n - 1 - w && sign * cum[i] <= sign * cum[i - 1]) monotone = false;
      if (monotone) {
        lx.push_back(std::log(coord[i]));
        ly.push_back(std::log(v));
      }
    }
    if (monotone && static_cast<int>(lx.size()) == w + 1) {
      const double slope = fit_slope(lx, ly);
      if (slope > cfg.divergence_slope) {
        out.state = FeatureState::Divergent;
        out.slope = slope;
        std::ostringstream os;
        os << what << ": truncated integrals grow with log-log slope " << slope;
        out.note = os.str();
        return out;
      }
    }
  }

  out.state = FeatureState::Stuck;
  std::ostringstream os;
  os << what << ": shell sequence neither certifiably decaying nor growing above "
     << "the divergence threshold";
  out.note = os.str();
  return out;
}

struct Piece {
  double a, b;            // finite anchors of the proper part
  bool tail_lo = false;   // a == -inf conceptually
  bool tail_hi = false;   // b == +inf conceptually
  bool sing_lo = false;   // declared singular approach at a
  bool sing_hi = false;   // declared singular approach at b
};

// Split the axis at declared singular points and at anchors separating two
// improper features, so each piece carries at most one feature.
std::vector<Piece> decompose(const Axis& axis) {
  std::vector<double> cuts = axis.singular;
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> keep;
  for (double s : cuts) {
    if (s >= axis.lo && s <= axis.hi) keep.push_back(s);
  }

  struct Raw {
    double a, b;
    bool sa, sb;  // singular end flags
  };
  std::vector<Raw> raw;
  double left = axis.lo;
  bool left_sing = std::binary_search(keep.begin(), keep.end(), axis.lo);
  for (double s : keep) {
    if (s > left) {
      raw.push_back({left, s, left_sing, true});
      left = s;
      left_sing = true;
    }
  }
  if (axis.hi > left) {
    bool right_sing = std::binary_search(keep.begin(), keep.end(), axis.hi) &&
                      std::isfinite(axis.hi);
    raw.push_back({left, axis.hi, left_sing, right_sing});
  }

  std::vector<Piece> out;
  for (const Raw& r : raw) {
    const bool tlo = std::isinf(r.a);
    const bool thi = std::isinf(r.b);
    const bool slo = r.sa && !tlo;
    const bool shi = r.sb && !thi;
    const int features = (tlo || slo ? 1 : 0) + (thi || shi ? 1 : 0);
    if (features <= 1) {
      out.push_back({r.a, r.b, tlo, thi, slo, shi});
      continue;
    }
    // Two features: split at an interior anchor.
    double anchor;
    if (tlo && thi) {
      anchor = 0.0;
    } else if (tlo) {
      anchor = r.b - std::max(1.0, std::abs(r.b));
    } else if (thi) {
      anchor = r.a + std::max(1.0, std::abs(r.a));
    } else {
      anchor = 0.5 * (r.a + r.b);
    }
    out.push_back({r.a, anchor, tlo, false, slo, false});
    out.push_back({anchor, r.b, false, thi, false, shi});
  }
  return out;
}

struct Accumulator {
  double value = 0.0;
  double err = 0.0;
  bool all_converged = true;
  bool divergent = false;
  double slope = 0.0;
  bool stuck = false;
  std::string note;

  void add_segment(const SegmentResult& s) {
    value += s.value;
    err += s.err;
    all_converged = all_converged && s.converged;
  }
  void add_feature(const FeatureResult& f) {
    value += f.sum + f.remainder;
    err += f.err + f.remainder_err;
    if (f.state == FeatureState::Divergent) {
      divergent = true;
      slope = std::max(slope, f.slope);
      if (note.empty()) note = f.note;
    } else if (f.state == FeatureState::Stuck) {
      stuck = true;
      if (note.empty()) note = f.note;
    }
  }
};

}  // namespace

Verdict integrate_improper(const Fn1& f, const Axis& axis,
                           const QuadConfig& cfg) {
  if (!(axis.hi > axis.lo)) return Verdict::finite_value(0.0, 0.0);

  // Shell values feed ratio extrapolation whose sensitivity is amplified by
  // 1/(1-r)^2; integrate them well below the requested tolerance.
  const double shell_rel = std::max(cfg.rel_tol * 1e-4, 1e-13);
  const double shell_abs = cfg.abs_tol;
  const auto pieces = decompose(axis);

  Accumulator acc;
  // Proper cores first, so feature analysis knows the overall scale.
  for (const Piece& p : pieces) {
    if (!p.tail_lo && !p.tail_hi && !p.sing_lo && !p.sing_hi) {
      acc.add_segment(adaptive(f, p.a, p.b, cfg.rel_tol, cfg.abs_tol, cfg.max_panels));
    }
  }
  const double base = cfg.ladder_base;
  const int rungs = cfg.ladder_rungs;

  for (const Piece& p : pieces) {
    if (p.tail_hi || p.tail_lo) {
      // Unbounded tail: core up to the first ladder radius beyond the finite
      // anchor, then geometric shells.
      const double anchor = p.tail_hi ? p.a : p.b;
      const double dir = p.tail_hi ? 1.0 : -1.0;
      int k0 = 0;
      while (std::pow(base, k0) < std::abs(anchor) + 1.0 && k0 < rungs) ++k0;
      if (std::pow(base, k0) < std::abs(anchor) + 1.0) {
        acc.stuck = true;
        if (acc.note.empty()) {
          acc.note = "truncation ladder does not reach beyond the finite anchor";
        }
        continue;
      }
      const double r0 = std::pow(base, k0) * dir;
      if ((p.tail_hi && r0 > anchor) || (!p.tail_hi && r0 < anchor)) {
        const double lo = p.tail_hi ? anchor : r0;
        const double hi = p.tail_hi ? r0 : anchor;
        acc.add_segment(adaptive(f, lo, hi, cfg.rel_tol, cfg.abs_tol, cfg.max_panels));
      }
      std::vector<double> shells, errs, coord;
      std::vector<bool> ok;
      for (int k = k0 + 1; k <= rungs; ++k) {
        const double ra = std::pow(base, k - 1) * dir;
        const double rb = std::pow(base, k) * dir;
        const double lo = p.tail_hi ? ra : rb;
        const double hi = p.tail_hi ? rb : ra;
        SegmentResult s = adaptive(f, lo, hi, shell_rel, shell_abs, cfg.max_panels);
        shells.push_back(s.value);
        errs.push_back(s.err);
        ok.push_back(s.converged);
        coord.push_back(std::pow(base, k));
      }
      const char* what = p.tail_hi ? "tail at +inf" : "tail at -inf";
      acc.add_feature(analyse_feature(shells, errs, ok, coord,
                                      std::abs(acc.value), cfg, what));
    } else if (p.sing_lo || p.sing_hi) {
      // Approach to a declared singularity: geometric shells shrinking
      // toward it, remainder extrapolated from the shell ratios.
      const double s0 = p.sing_lo ? p.a : p.b;
      const double other = p.sing_lo ? p.b : p.a;
      const double len = std::abs(other - s0);
      std::vector<double> shells, errs, coord;
      std::vector<bool> ok;
      for (int k = 1; k <= rungs; ++k) {
        const double da = len * std::pow(base, -(k - 1));
        const double db = len * std::pow(base, -k);
        const double a2 = p.sing_lo ? s0 + db : s0 - da;
        const double b2 = p.sing_lo ? s0 + da : s0 - db;
        SegmentResult s = adaptive(f, a2, b2, shell_rel, shell_abs, cfg.max_panels);
        shells.push_back(s.value);
        errs.push_back(s.err);
        ok.push_back(s.converged);
        coord.push_back(std::pow(base, k) / len);
      }
      acc.add_feature(analyse_feature(shells, errs, ok, coord,
                                      std::abs(acc.value), cfg,
                                      "singular approach"));
    }
  }

  if (acc.divergent) return Verdict::infinite_growth(acc.slope, acc.note);
  if (acc.stuck) return Verdict::undecided(acc.note);
  if (!acc.all_converged) {
    return Verdict::undecided("adaptive panel budget exhausted before tolerance");
  }
  if (acc.err <= cfg.rel_tol * std::max(1.0, std::abs(acc.value))) {
    return Verdict::finite_value(acc.value, acc.err);
  }
  return Verdict::undecided("error estimate above tolerance");
}

namespace {

struct InnerFailure {
  Verdict verdict;
  double at;
};

}  // namespace

Verdict integrate_improper(const FnN& f, std::span<const Axis> axes,
                           const QuadConfig& cfg) {
  if (axes.empty()) return Verdict::finite_value(0.0, 0.0);
  if (axes.size() > 3) {
    throw std::invalid_argument("integrate_improper supports at most 3 axes");
  }
  if (axes.size() == 1) {
    const Fn1 g = [&f](double x) {
      const std::array<double, 1> pt{x};
      return f(std::span<const double>(pt));
    };
    return integrate_improper(g, axes[0], cfg);
  }
  const auto inner_axes = axes.subspan(1);
  const QuadConfig inner_cfg = cfg.inner();
  const Fn1 g = [&](double t) -> double {
    const FnN bound = [&f, t](std::span<const double> xs) {
      std::array<double, 3> pt{};
      pt[0] = t;
      for (size_t i = 0; i < xs.size(); ++i) pt[i + 1] = xs[i];
      return f(std::span<const double>(pt.data(), xs.size() + 1));
    };
    Verdict v = integrate_improper(bound, inner_axes, inner_cfg);
    if (!v.finite()) throw InnerFailure{std::move(v), t};
    return v.value;
  };
  try {
    Verdict v = integrate_improper(g, axes[0], cfg);
    if (v.finite()) {
      // Inner values are only accurate to the inner tolerance, which the
      // outer panel error estimate cannot see.
      v.err += inner_cfg.rel_tol * std::abs(v.value);
    }
    return v;
  } catch (const InnerFailure& fail) {
    std::ostringstream os;
    os << "inner integral " << to_string(fail.verdict.outcome)
       << " at outer coordinate " << fail.at;
    if (fail.verdict.infinite() && cfg.nonneg) {
      return Verdict::infinite_growth(fail.verdict.slope, os.str());
    }
    return Verdict::undecided(os.str());
  }
}

Verdict bimeasure_integral(const std::function<double(double, double)>& h1,
                           const std::function<double(double, double)>& h2,
                           const Fn1& f, const Axis& time_axis,
                           double space_lo, double space_hi,
                           const QuadConfig& cfg) {
  const QuadConfig cfg_x = cfg.inner();
  const QuadConfig cfg_xp = cfg_x.inner();
  // f symmetric: integrate the symmetrised product over the triangle
  // x' <= x and double it.
  const Fn1 g = [&](double t) -> double {
    const Fn1 over_x = [&, t](double x) -> double {
      const Fn1 over_xp = [&, t, x](double xp) {
        const double prod =
            0.5 * (h1(t, x) * h2(t, xp) + h1(t, xp) * h2(t, x));
        return prod * f(x - xp);
      };
      Verdict inner = integrate_improper(over_xp, Axis{space_lo, x}, cfg_xp);
      if (!inner.finite()) throw InnerFailure{std::move(inner), x};
      return inner.value;
    };
    Verdict mid = integrate_improper(over_x, Axis{space_lo, space_hi}, cfg_x);
    if (!mid.finite()) throw InnerFailure{std::move(mid), t};
    return 2.0 * mid.value;
  };
  try {
    Verdict v = integrate_improper(g, time_axis, cfg);
    if (v.finite()) v.err += cfg_x.rel_tol * std::abs(v.value);
    return v;
  } catch (const InnerFailure& fail) {
    std::ostringstream os;
    os << "spatial integral " << to_string(fail.verdict.outcome)
       << " near coordinate " << fail.at;
    return Verdict::undecided(os.str());
  }
}

}  // namespace ambit::quad
