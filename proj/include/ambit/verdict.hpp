#pragma once

#include <string>

namespace ambit::quad {

enum class Outcome { Finite, Infinite, Inconclusive };

const char* to_string(Outcome o);

/// Three-valued convergence decision for improper integrals. `value`/`err`
/// are populated for Finite, `slope` records the fitted log-log growth
/// exponent behind an Infinite call, `reason` explains Inconclusive outcomes
/// (and carries the divergence diagnostic text for Infinite).
struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  double value = 0.0;
  double err = 0.0;
  double slope = 0.0;
  std::string reason;

  bool finite() const { return outcome == Outcome::Finite; }
  bool infinite() const { return outcome == Outcome::Infinite; }
  bool inconclusive() const { return outcome == Outcome::Inconclusive; }

  static Verdict finite_value(double v, double e) {
    Verdict out;
    out.outcome = Outcome::Finite;
    out.value = v;
    out.err = e;
    return out;
  }
  static Verdict infinite_growth(double s, std::string why) {
    Verdict out;
    out.outcome = Outcome::Infinite;
    out.slope = s;
    out.reason = std::move(why);
    return out;
  }
  static Verdict undecided(std::string why) {
    Verdict out;
    out.outcome = Outcome::Inconclusive;
    out.reason = std::move(why);
    return out;
  }
};

}  // namespace ambit::quad
