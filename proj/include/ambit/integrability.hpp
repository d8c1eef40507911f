#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ambit/triplet.hpp"

namespace ambit::integrability {

using measure::CharacteristicTriplet;
using measure::TruncationFunction;

/// Deterministic integrand H(t,x), optionally modulated by a volatility
/// path sigma so the effective integrand is H*sigma (pathwise plug-in).
struct IntegrandSpec {
  measure::TimeSpaceFn H;
  std::vector<double> time_singularities{};
  measure::TimeSpaceFn sigma;  // optional; null means sigma == 1

  double effective(double t, std::span<const double> x) const {
    const double h = H(t, x);
    return sigma ? h * sigma(t, x) : h;
  }
  static IntegrandSpec of(measure::TimeSpaceFn h) {
    IntegrandSpec s;
    s.H = std::move(h);
    return s;
  }
  static IntegrandSpec of_time(std::function<double(double)> h) {
    return of(measure::time_field(std::move(h)));
  }
};

/// Drift blow-up controls of the integrability check: `at_scale` is the
/// absolute compensated drift at scale a, `sup_rescaled` its supremum over
/// rescalings c in [-1,1], maximised on a grid with one refinement pass.
struct DriftScaleBounds {
  double at_scale = 0.0;
  double sup_rescaled = 0.0;
};
DriftScaleBounds drift_scale_bounds(double t, std::span<const double> x, double a,
                                    const CharacteristicTriplet& triplet,
                                    const TruncationFunction& tau,
                                    const quad::QuadConfig& cfg = {},
                                    int grid_points = 201);

quad::Verdict check_condition_drift(const IntegrandSpec& H,
                                    const CharacteristicTriplet& triplet,
                                    const TruncationFunction& tau,
                                    const quad::QuadConfig& cfg = {});

quad::Verdict check_condition_gaussian(const IntegrandSpec& H,
                                       const CharacteristicTriplet& triplet,
                                       const quad::QuadConfig& cfg = {});

/// Membership test of a signed integrand against a coloured covariance:
/// the inner spatial integral must be finite for (sampled) a.e. t and the
/// signed double integral finite. When the inner signed integral vanishes
/// at every sampled time relative to its |H| counterpart (the
/// Fourier-orthogonal case), the time integral is declared zero instead of
/// amplifying cancellation noise over an unbounded horizon.
quad::Verdict colored_l0_verdict(const std::function<double(double, double)>& h,
                                 const quad::Fn1& f, const quad::Axis& time_axis,
                                 double space_lo, double space_hi,
                                 const quad::QuadConfig& cfg = {});

/// Colored case: the membership test with signed H (inner spatial integral
/// finite a.e. plus the signed double integral) and the strict variant on
/// |H| deciding the dominated-convergence class.
struct ColoredGaussianVerdicts {
  quad::Verdict l0;
  quad::Verdict strict;
};
ColoredGaussianVerdicts check_condition_gaussian_colored(
    const IntegrandSpec& H, const CharacteristicTriplet& triplet,
    const quad::QuadConfig& cfg = {});

quad::Verdict check_condition_jump(const IntegrandSpec& H,
                                   const CharacteristicTriplet& triplet,
                                   const quad::QuadConfig& cfg = {});

enum class Conjunction { Integrable, NotIntegrable, Inconclusive };
enum class Variant { ProperTau, TauZeroSufficient, TauZeroPositiveMeasure };

const char* to_string(Conjunction c);
const char* to_string(Variant v);

struct IntegrabilityReport {
  quad::Verdict cond1;
  quad::Verdict cond2;
  quad::Verdict cond3;  // under tau = 0 this is the 1 ^ |Hy| variant
  std::optional<quad::Verdict> cond2_strict;  // colored triplets only
  Conjunction conjunction = Conjunction::Inconclusive;
  TruncationFunction tau_used;
  Variant variant = Variant::ProperTau;
};

class ImproperTauMisuse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Membership decision for H in L0(M). With a proper tau the three
/// conditions are necessary and sufficient; with tau = 0 they are sufficient
/// only (and necessary exactly when the triplet is flagged positive or
/// negative), so NotIntegrable is never claimed without that flag.
IntegrabilityReport check_integrable(const IntegrandSpec& H,
                                     const CharacteristicTriplet& triplet,
                                     const TruncationFunction& tau,
                                     const quad::QuadConfig& cfg = {});

/// Monte Carlo surrogate over volatility paths: fraction of paths whose
/// pathwise report is Integrable.
double integrable_fraction(const IntegrandSpec& H,
                           const CharacteristicTriplet& triplet,
                           const TruncationFunction& tau,
                           std::span<const measure::TimeSpaceFn> sigma_paths,
                           const quad::QuadConfig& cfg = {});

}  // namespace ambit::integrability
