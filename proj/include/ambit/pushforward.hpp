#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ambit/basis_sim.hpp"
#include "ambit/integrability.hpp"
#include "ambit/triplet.hpp"

namespace ambit::pushforward {

using integrability::IntegrandSpec;
using measure::CharacteristicTriplet;
using measure::JumpMeasureSpec;
using measure::TruncationFunction;

/// Characteristic triplet restricted to a single spatial point: the law of
/// the integral process of H against the basis.
struct NullSpatialTriplet {
  std::function<double(double)> drift;
  std::function<double(double)> gaussian;
  std::function<JumpMeasureSpec(double)> jumps;
  measure::TimeControl time;
  TruncationFunction tau;

  CharacteristicTriplet as_triplet() const;
};

class NotIntegrableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Characteristics of the integral process: drift picks up the truncation
/// cross terms, the Gaussian part contracts to int H^2 c over space, and the
/// jump kernel is the image of K under y -> H(t,x) y cell by cell.
NullSpatialTriplet pushforward_characteristics(
    const CharacteristicTriplet& triplet, const IntegrandSpec& H,
    const TruncationFunction& tau, const quad::QuadConfig& cfg = {},
    bool skip_integrability_check = false);

/// Simple-integrand integral sum a_i M(A_i) over cell-aligned regions.
struct WeightedRegion {
  double coefficient;
  sim::GridRegion region;
};
double simple_integral(std::span<const WeightedRegion> summands,
                       const sim::BasisRealization& realization);

/// Cumulative cell sums of H(cell) M(cell) on the realization grid,
/// sampled at the grid times. Deterministic given (triplet, grid, seed).
std::vector<std::pair<double, double>> simulate_path_integral(
    const IntegrandSpec& H, const CharacteristicTriplet& triplet, double horizon,
    int n_steps, std::uint64_t seed, const sim::SimOptions& opts = {});

struct CfCheckRow {
  double u;
  std::complex<double> empirical;
  std::complex<double> theoretical;
  double se;
  double z;
};

struct CfCheckResult {
  std::vector<CfCheckRow> rows;
  double max_distance = 0.0;
};

/// Empirical characteristic function of the integral at the horizon versus
/// exp of the integrated pushforward exponent; z-scores use the asymptotic
/// CF estimator variance. Jumps enter with their exact times, continuous
/// parts at cell centers. Monte Carlo replications split across `threads`
/// workers over counter-based per-path streams; aggregation order is fixed.
CfCheckResult cf_distance(const IntegrandSpec& H,
                          const CharacteristicTriplet& triplet,
                          const TruncationFunction& tau, double horizon,
                          std::span<const double> u_grid, int n_samples,
                          std::uint64_t seed, int n_steps = 64, int threads = 1,
                          const quad::QuadConfig& cfg = {});

/// Exponent of the law of the integral over [t0, t1] from a null-spatial
/// triplet, by quadrature of the pointwise Levy-Khintchine integrand.
std::complex<double> exponent_over_window(const NullSpatialTriplet& ns, double t0,
                                          double t1, double u,
                                          const quad::QuadConfig& cfg = {});

}  // namespace ambit::pushforward
