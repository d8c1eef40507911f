#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ambit/rng.hpp"
#include "ambit/triplet.hpp"

namespace ambit::sim {

/// Rectangular space-time simulation grid: uniform time steps times the
/// space cells of the control measure, with per-cell A-masses.
struct GridSpec {
  double t0 = 0.0;
  double t1 = 1.0;
  int n_steps = 1;
  std::vector<measure::SpaceCell> space;

  double dt() const { return (t1 - t0) / n_steps; }
  int n_cells() const { return n_steps * static_cast<int>(space.size()); }
  int cell_index(int step, int space_id) const {
    return step * static_cast<int>(space.size()) + space_id;
  }
  int step_of(int cell) const { return cell / static_cast<int>(space.size()); }
  int space_of(int cell) const { return cell % static_cast<int>(space.size()); }
  double step_lo(int step) const { return t0 + step * dt(); }
  double step_hi(int step) const { return t0 + (step + 1) * dt(); }
  double cell_mass(int cell) const {
    return dt() * space[space_of(cell)].weight;
  }

  static GridSpec uniform(double a, double b, int steps,
                          std::vector<measure::SpaceCell> cells) {
    GridSpec g;
    g.t0 = a;
    g.t1 = b;
    g.n_steps = steps;
    g.space = std::move(cells);
    return g;
  }
};

enum class SmallJumpMode { DiffusionApprox, Dropped };

struct Jump {
  double t;
  int cell;
  double size;
};

/// One simulated sample of a Levy basis on a grid: per-cell Gaussian
/// increments and drift masses plus the explicit jump list. Small-jump
/// handling is recorded so downstream consumers know the bias.
struct BasisRealization {
  GridSpec grid;
  std::vector<double> gaussian;        // per cell
  std::vector<double> drift;           // per cell
  std::vector<Jump> jumps;             // sorted by time, strictly increasing
  SmallJumpMode mode = SmallJumpMode::DiffusionApprox;
  double eps = 0.0;
  std::vector<double> small_var;       // diffusion surrogate variance per cell
  std::vector<double> small_bias;      // recorded drop bias per cell
  std::uint64_t seed = 0;

  double cell_value(int cell) const;
  double total_mass() const;
};

class CutoffTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimOptions {
  SmallJumpMode mode = SmallJumpMode::DiffusionApprox;
  double max_expected_jumps = 1e7;
  quad::QuadConfig quad{};
};

/// Independently scattered simulation: per cell, Gaussian increment
/// N(0, c m), Poisson jumps above the cutoff with uniform times, drift mass
/// with the tau-compensation bookkeeping of the triplet.
BasisRealization simulate_levy_basis(const measure::CharacteristicTriplet& triplet,
                                     const GridSpec& grid, double eps,
                                     std::uint64_t seed,
                                     const SimOptions& opts = {});

/// Cell-aligned region of a realization grid.
struct GridRegion {
  double t0;
  double t1;
  std::vector<int> space_ids{};  // empty = all space cells
};

class RegionNotAligned : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// M(region) for one realization; region bounds must align with grid edges.
double region_mass(const BasisRealization& real, const GridRegion& region);

struct CfEstimate {
  std::complex<double> mean;
  double se_re = 0.0;
  double se_im = 0.0;
};

/// Empirical characteristic function of M(region) across realizations.
CfEstimate empirical_cf(const std::vector<BasisRealization>& realizations,
                        const GridRegion& region, double u);

/// CSV serialisation: cells file (cell_id,t0,t1,space_id,gaussian,drift) and
/// jumps file (t,cell_id,size).
std::string cells_csv(const BasisRealization& real);
std::string jumps_csv(const BasisRealization& real);

/// Inverse-CDF sampler for the density part restricted to |y| > eps;
/// total_mass is the restricted intensity.
struct DensitySamplerHandle {
  double total_mass = 0.0;
  std::function<double(double)> inv_cdf;  // maps u in (0,1) to a jump size
};
DensitySamplerHandle build_density_sampler(const measure::JumpDensity& den,
                                           double eps,
                                           const quad::QuadConfig& cfg = {});

}  // namespace ambit::sim
