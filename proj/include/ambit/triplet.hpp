#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ambit/control_measure.hpp"
#include "ambit/jump_measure.hpp"
#include "ambit/truncation.hpp"

namespace ambit::measure {

using TimeSpaceFn = std::function<double(double, std::span<const double>)>;
using JumpKernelFn = std::function<JumpMeasureSpec(double, std::span<const double>)>;

inline TimeSpaceFn constant_field(double v) {
  return [v](double, std::span<const double>) { return v; };
}
inline TimeSpaceFn time_field(std::function<double(double)> f) {
  return [f = std::move(f)](double t, std::span<const double>) { return f(t); };
}

/// Gaussian part: either orthogonal with variance density c(t,x) against A,
/// or coloured in space (white in time, spatially homogeneous covariance
/// kernel f(x-x'), 1-d space).
struct GaussianPart {
  enum class Kind { Orthogonal, Colored };
  Kind kind = Kind::Orthogonal;
  TimeSpaceFn c;                      // Orthogonal
  std::function<double(double)> f;    // Colored

  static GaussianPart orthogonal(TimeSpaceFn cd) {
    GaussianPart g;
    g.kind = Kind::Orthogonal;
    g.c = std::move(cd);
    return g;
  }
  static GaussianPart colored(std::function<double(double)> cov) {
    GaussianPart g;
    g.kind = Kind::Colored;
    g.f = std::move(cov);
    return g;
  }
  static GaussianPart none() { return orthogonal(constant_field(0.0)); }
};

/// Densities (b, c or f, K) of a characteristic triplet against the control
/// measure A, stated with respect to the truncation function tau.
struct CharacteristicTriplet {
  TimeSpaceFn drift;        // b(t,x)
  GaussianPart gaussian;
  JumpKernelFn jumps;       // K(t,x)
  ControlMeasure control;   // A
  TruncationFunction tau = TruncationFunction::standard(1.0);

  struct Flags {
    bool orthogonal = true;
    bool different_discontinuity_times = true;
    bool no_fixed_discontinuities = true;
    int sign = 0;  // +1 positive measure, -1 negative, 0 unrestricted
  } flags;
};

/// Every violated invariant with the witnessing sample point; empty = valid
/// at the configured sampling resolution.
std::vector<std::string> validate_triplet(const CharacteristicTriplet& triplet,
                                          const quad::QuadConfig& cfg = {},
                                          int samples_per_axis = 9);

/// Cell-aligned region of finite A-mass: a time window times a subset of
/// space (all space when cell_ids is empty).
struct Region {
  double t0 = 0.0;
  double t1 = 1.0;
  std::vector<int> cell_ids{};  // empty = all
};

class NonFiniteRegion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ColoredUnsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Levy-Khintchine exponent psi(u) with E[e^{iu M(region)}] = e^{psi(u)} for
/// an independently scattered basis carrying this triplet.
std::complex<double> levy_khintchine_exponent(
    const CharacteristicTriplet& triplet, const Region& region, double u,
    const quad::QuadConfig& cfg = {});

/// Integrand of the jump part of the exponent, stable near y = 0.
std::complex<double> jump_cf_term(double u, double y,
                                  const TruncationFunction& tau);

class RetruncationDivergent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Restates the triplet against a new truncation function; only the drift
/// changes, by the compensation integral int (tau2 - tau1) dK per unit
/// A-mass. Throws RetruncationDivergent when that integral does not converge
/// at a sampled point.
CharacteristicTriplet retruncate(const CharacteristicTriplet& triplet,
                                 const TruncationFunction& tau2,
                                 const quad::QuadConfig& cfg = {});

}  // namespace ambit::measure
