#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ambit/quadrature.hpp"

namespace ambit::measure {

/// Temporal factor of the control measure A(dt,dx).
struct TimeControl {
  enum class Kind { Lebesgue, Density };
  Kind kind = Kind::Lebesgue;
  double t0 = 0.0;
  double t1 = 1.0;  // may be +inf
  std::function<double(double)> density;  // Density kind, >= 0

  static TimeControl lebesgue(double a, double b) {
    return TimeControl{Kind::Lebesgue, a, b, nullptr};
  }
  static TimeControl with_density(double a, double b,
                                  std::function<double(double)> d) {
    return TimeControl{Kind::Density, a, b, std::move(d)};
  }
};

struct SpaceCell {
  int id = 0;
  std::vector<double> center{0.0};
  double weight = 1.0;  // A-weight (FiniteGrid) or probability (Probability)
};

/// Spatial factor: a finite weighted grid, Lebesgue measure on a box, or a
/// discrete probability.
struct SpaceControl {
  enum class Kind { FiniteGrid, LebesgueBox, Probability };
  Kind kind = Kind::FiniteGrid;
  std::vector<SpaceCell> cells;  // FiniteGrid / Probability
  std::vector<std::pair<double, double>> box;  // LebesgueBox, dim <= 2

  static SpaceControl single_point() {
    SpaceControl s;
    s.kind = Kind::FiniteGrid;
    s.cells = {SpaceCell{0, {0.0}, 1.0}};
    return s;
  }
  static SpaceControl finite_grid(std::vector<SpaceCell> cells) {
    SpaceControl s;
    s.kind = Kind::FiniteGrid;
    s.cells = std::move(cells);
    return s;
  }
  static SpaceControl lebesgue_box(std::vector<std::pair<double, double>> b) {
    SpaceControl s;
    s.kind = Kind::LebesgueBox;
    s.box = std::move(b);
    return s;
  }

  double total_weight() const {
    double w = 0.0;
    for (const auto& c : cells) w += c.weight;
    return w;
  }
};

/// Product control measure A(dt,dx) = time x space.
struct ControlMeasure {
  TimeControl time;
  SpaceControl space;

  /// Integrates F(t,x) against A. Unbounded/singular behaviour in time is
  /// handled by the ladder; finite-grid space collapses to a weighted sum.
  quad::Verdict integrate(
      const std::function<double(double, std::span<const double>)>& F,
      const quad::QuadConfig& cfg = {},
      std::span<const double> time_singularities = {}) const;

  /// A-mass of [a,b] x (all space); +inf when the time window is unbounded.
  double mass(double a, double b) const;
};

}  // namespace ambit::measure
