#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ambit/basis_sim.hpp"
#include "ambit/integrability.hpp"
#include "ambit/jump_measure.hpp"
#include "ambit/quadrature.hpp"

namespace ambit::kernels {

class SingularEvaluation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Whole-space heat kernel exp(-|x-y|^2/(4(t-s))) / (4 pi (t-s))^{d/2} for
/// 0 < s < t, zero otherwise. Throws at the s = t, x = y singularity.
double heat_green(double t, double s, std::span<const double> x,
                  std::span<const double> y, int d);

/// Deterministic ambit kernel h(t,s;x,y); all kinds are causal (zero for
/// s >= t except Custom, which is trusted).
struct KernelSpec {
  enum class Kind { Heat, Exponential, Tabulated, Custom };
  Kind kind = Kind::Exponential;
  int heat_dim = 1;   // Heat
  double eta = 1.0;   // Exponential: e^{-eta (t-s)}
  std::vector<double> lag_grid;    // Tabulated: kernel of the lag t-s
  std::vector<double> lag_values;
  std::function<double(double, double, std::span<const double>,
                       std::span<const double>)>
      fn;  // Custom

  double operator()(double t, double s, std::span<const double> x,
                    std::span<const double> y) const;

  static KernelSpec heat(int d) {
    KernelSpec k;
    k.kind = Kind::Heat;
    k.heat_dim = d;
    return k;
  }
  static KernelSpec exponential(double eta) {
    KernelSpec k;
    k.kind = Kind::Exponential;
    k.eta = eta;
    return k;
  }
  static KernelSpec tabulated(std::vector<double> lags, std::vector<double> vals);
  static KernelSpec custom(
      std::function<double(double, double, std::span<const double>,
                           std::span<const double>)>
          f);
};

/// Verdict of int_0^t int_{R^d} G(t,s;x,y)^p dy ds, the L^p membership of
/// the heat kernel, via the radial reduction of the space integral and the
/// declared singularity at s = t.
quad::Verdict heat_lp_verdict(double p, int d, double t,
                              const quad::QuadConfig& cfg = {});

/// Sufficient-condition pair for the heat equation driven by a pure-jump
/// basis: kernel-side L^p integral scaled by the p-th sigma moment, and the
/// small-jump moment int_{[-1,1]} |xi|^p nu(dxi).
struct HeatExistenceResult {
  quad::Verdict kernel_side;
  quad::Verdict jump_side;
  bool sufficient = false;  // both Finite
};
HeatExistenceResult check_heat_existence(double p, const measure::JumpMeasureSpec& nu,
                          double sigma_p_moment, int d, double t,
                          const quad::QuadConfig& cfg = {});

/// Query point for ambit evaluation.
struct QueryPoint {
  double t;
  std::vector<double> x{};
};

/// Y(t,x) = sum over cells of h * sigma * (gaussian + drift) at cell centers
/// plus sum over jumps of h * sigma * size at the exact jump coordinates.
std::vector<double> evaluate_ambit(const KernelSpec& kernel,
                                   const measure::TimeSpaceFn& sigma,
                                   const sim::BasisRealization& realization,
                                   std::span<const QueryPoint> queries);

enum class ColoredClass { InL0Only, InL10, NotInL0, Inconclusive };
const char* to_string(ColoredClass c);

/// Classification of a deterministic integrand against a coloured Gaussian
/// basis: in the dominated-convergence class, only in the improper
/// extension, in neither, or undecidable at the configured tolerances.
ColoredClass classify_colored_example(
    const std::function<double(double, double)>& H, const quad::Fn1& f,
    const quad::Axis& time_axis, double space_lo, double space_hi,
    const quad::QuadConfig& cfg = {});

/// Halving study for the kernel discretisation: Y at the finest grid plus
/// the drift of Y across refinements, reported rather than assumed small.
struct RefinementReport {
  std::vector<int> steps;
  std::vector<double> values;
  double last_delta = 0.0;
};
RefinementReport refinement_study(const KernelSpec& kernel,
                                  const measure::TimeSpaceFn& sigma,
                                  const measure::CharacteristicTriplet& triplet,
                                  double horizon, const QueryPoint& query,
                                  std::uint64_t seed, int coarse_steps = 16,
                                  int doublings = 3,
                                  const sim::SimOptions& opts = {});

}  // namespace ambit::kernels
