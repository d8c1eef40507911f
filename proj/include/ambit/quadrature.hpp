#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ambit/verdict.hpp"

namespace ambit::quad {

struct QuadConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  // Adaptive panel budget per ladder shell / proper segment.
  int max_panels = 512;
  // Geometric truncation ladder: radii base^0 .. base^rungs, applied both to
  // unbounded tails and (reciprocally) to approaches of declared
  // singularities.
  double ladder_base = 2.0;
  int ladder_rungs = 20;
  // Divergence call: fitted log-log slope of the truncated-integral sequence
  // over the last `divergence_window` rungs must exceed this.
  double divergence_slope = 0.05;
  int divergence_window = 4;
  // Fubini hint: integrand is known nonnegative, so a divergent inner axis
  // makes the whole integral infinite.
  bool nonneg = false;

  QuadConfig inner() const {
    QuadConfig c = *this;
    c.rel_tol = rel_tol * 0.1;
    return c;
  }
};

/// Thrown when the integrand returns NaN; carries the offending point.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::string what, std::vector<double> pt)
      : std::runtime_error(std::move(what)), point(std::move(pt)) {}
  std::vector<double> point;
};

/// One coordinate axis of the integration box. Endpoints may be +-infinity.
/// `singular` lists declared singular coordinates (endpoints or interior
/// split points); the engine refines geometrically toward each of them.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> singular{};
};

using Fn1 = std::function<double(double)>;
using FnN = std::function<double(std::span<const double>)>;

/// Improper 1-d integral with ladder-certified Finite value, slope-fitted
/// Infinite call, or Inconclusive.
Verdict integrate_improper(const Fn1& f, const Axis& axis,
                           const QuadConfig& cfg = {});

/// n-d (n<=3) iterated version; axes[0] is the outermost direction and
/// should carry the improper feature that decides convergence.
Verdict integrate_improper(const FnN& f, std::span<const Axis> axes,
                           const QuadConfig& cfg = {});

/// Evaluates integral of h1(t,x) h2(t,x') f(x-x') over time x space x space,
/// symmetrised in (x,x') since f is symmetric. Space box is 1-d.
Verdict bimeasure_integral(const std::function<double(double, double)>& h1,
                           const std::function<double(double, double)>& h2,
                           const Fn1& f, const Axis& time_axis,
                           double space_lo, double space_hi,
                           const QuadConfig& cfg = {});

}  // namespace ambit::quad
