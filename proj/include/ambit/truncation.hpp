#pragma once

#include <cmath>
#include <functional>
#include <string>

namespace ambit::measure {

/// Truncation function separating small and large jumps. `standard(b)` is
/// y*1_{|y|<b}; `zero` is the improper variant for summable-jump measures;
/// `custom` wraps a user callable that must equal y near 0 and stay within
/// `bound` in absolute value.
struct TruncationFunction {
  enum class Kind { Standard, Zero, Custom };

  Kind kind = Kind::Standard;
  double bound = 1.0;
  std::function<double(double)> fn;  // Custom only

  double operator()(double y) const {
    switch (kind) {
      case Kind::Standard: return std::abs(y) < bound ? y : 0.0;
      case Kind::Zero: return 0.0;
      case Kind::Custom: return fn(y);
    }
    return 0.0;
  }

  bool is_zero() const { return kind == Kind::Zero; }

  static TruncationFunction standard(double b) {
    return TruncationFunction{Kind::Standard, b, nullptr};
  }
  static TruncationFunction zero() {
    return TruncationFunction{Kind::Zero, 0.0, nullptr};
  }
  static TruncationFunction custom(std::function<double(double)> f, double b) {
    return TruncationFunction{Kind::Custom, b, std::move(f)};
  }

  std::string describe() const;
};

}  // namespace ambit::measure
