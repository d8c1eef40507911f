#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ambit/quadrature.hpp"

namespace ambit::measure {

struct JumpAtom {
  double size;  // != 0
  double mass;  // > 0
};

/// Absolutely continuous jump part. `alpha0` describes the local blow-up
/// |y|^{-1-alpha0} near 0 and `alpha_inf` the tail decay; both are
/// descriptors used for validation messages, the quadrature ladder makes the
/// actual convergence calls.
struct JumpDensity {
  std::function<double(double)> rho;
  double support_lo = -1.0;  // may be -inf
  double support_hi = 1.0;   // may be +inf
  double alpha0 = 0.0;
  double alpha_inf = 0.0;
};

/// Levy measure nu(dy) = sum of point masses + density part.
struct JumpMeasureSpec {
  std::vector<JumpAtom> atoms;
  std::optional<JumpDensity> density;

  bool is_zero() const { return atoms.empty() && !density.has_value(); }
  double atom_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.mass;
    return m;
  }

  static JumpMeasureSpec zero() { return JumpMeasureSpec{}; }
  static JumpMeasureSpec single_atom(double size, double mass) {
    JumpMeasureSpec s;
    s.atoms.push_back({size, mass});
    return s;
  }
};

/// Integral of g against the jump measure: atoms summed exactly, density via
/// the improper-integral engine with the origin declared singular. g may be
/// signed (compensation integrals need that); the nonneg flag in cfg governs
/// divergence propagation as usual.
quad::Verdict integrate_jump(const std::function<double(double)>& g,
                             const JumpMeasureSpec& spec,
                             const quad::QuadConfig& cfg = {});

}  // namespace ambit::measure
