#include <doctest.h>

#include <cmath>

#include "ambit/ambit_kernels.hpp"

using namespace ambit;
using namespace ambit::kernels;
using measure::CharacteristicTriplet;
using measure::GaussianPart;
using measure::JumpMeasureSpec;
using measure::SpaceControl;
using measure::TimeControl;
using measure::TruncationFunction;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

CharacteristicTriplet cp_triplet(double mass) {
  CharacteristicTriplet t;
  t.drift = measure::constant_field(0.0);
  t.gaussian = GaussianPart::none();
  t.jumps = [mass](double, std::span<const double>) {
    return JumpMeasureSpec::single_atom(1.0, mass);
  };
  t.control.time = TimeControl::lebesgue(0.0, 1.0);
  t.control.space = SpaceControl::single_point();
  t.tau = TruncationFunction::zero();
  return t;
}

}  // namespace

TEST_SUITE("ambit_kernels") {

TEST_CASE("heat kernel point values and causality") {
  const double x[1] = {0.0};
  const double y[1] = {0.0};
  const double s = 1.0 - 1.0 / (4.0 * M_PI);
  CHECK(heat_green(1.0, s, {x, 1}, {y, 1}, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(heat_green(1.0, 2.0, {x, 1}, {y, 1}, 1) == 0.0);
  const double y2[1] = {0.3};
  CHECK(heat_green(1.0, 1.0, {x, 1}, {y2, 1}, 1) == 0.0);
  CHECK_THROWS_AS(heat_green(1.0, 1.0, {x, 1}, {y, 1}, 1), SingularEvaluation);
  CHECK(heat_green(1.0, -0.5, {x, 1}, {y, 1}, 1) == 0.0);
}

TEST_CASE("heat kernel integrates to one over space") {
  for (int d = 1; d <= 3; ++d) {
    const double omega = d == 1 ? 2.0 : (d == 2 ? 2.0 * M_PI : 4.0 * M_PI);
    for (double s : {0.2, 0.7, 0.95}) {
      const auto v = quad::integrate_improper(
          quad::Fn1([&](double r) {
            const double x[3] = {0.0, 0.0, 0.0};
            double y[3] = {r, 0.0, 0.0};
            return omega * std::pow(r, d - 1) *
                   heat_green(1.0, s, {x, (size_t)d}, {y, (size_t)d}, d);
          }),
          quad::Axis{0.0, kInf});
      REQUIRE(v.finite());
      CHECK(v.value == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("L^p verdicts on both sides of the threshold") {
  CHECK(heat_lp_verdict(2.0, 1, 1.0).finite());
  CHECK(heat_lp_verdict(2.1, 2, 1.0).infinite());
  CHECK(heat_lp_verdict(1.9, 2, 1.0).finite());
}

TEST_CASE("sufficient condition for the jump-driven heat equation") {
  measure::JumpMeasureSpec nu;
  measure::JumpDensity den;
  den.rho = [](double y) { return std::pow(std::abs(y), -2.2); };
  den.support_lo = -1.0;
  den.support_hi = 1.0;
  den.alpha0 = 1.2;
  nu.density = den;

  SUBCASE("d = 3, alpha = 1.2, p = 1.5: both sides finite") {
    const auto r = check_heat_existence(1.5, nu, 1.0, 3, 1.0);
    CHECK(r.kernel_side.finite());
    CHECK(r.jump_side.finite());
    CHECK(r.sufficient);
  }
  SUBCASE("p above the threshold fails on the kernel side") {
    const auto r = check_heat_existence(1.9, nu, 1.0, 3, 1.0);
    CHECK(r.kernel_side.infinite());
    CHECK(!r.sufficient);
  }
  SUBCASE("no jumps gives a zero jump side") {
    const auto r = check_heat_existence(1.5, JumpMeasureSpec::zero(), 1.0, 3, 1.0);
    REQUIRE(r.jump_side.finite());
    CHECK(r.jump_side.value == 0.0);
  }
  SUBCASE("the condition is only stated for p < 2") {
    CHECK_THROWS_AS(check_heat_existence(2.5, nu, 1.0, 2, 1.0), std::invalid_argument);
  }
}

TEST_CASE("ambit evaluation on realizations") {
  SUBCASE("constant kernel accumulates the total mass") {
    auto t = cp_triplet(2.0);
    t.drift = measure::constant_field(0.4);
    const auto grid = sim::GridSpec::uniform(0.0, 1.0, 4, t.control.space.cells);
    const auto real = sim::simulate_levy_basis(t, grid, 0.0, 17);
    const auto one = KernelSpec::custom(
        [](double tt, double s, std::span<const double>, std::span<const double>) {
          return s <= tt ? 1.0 : 0.0;
        });
    const QueryPoint q{1.0, {0.0}};
    const auto vals = evaluate_ambit(one, nullptr, real, {&q, 1});
    CHECK(vals[0] == doctest::Approx(real.total_mass()).epsilon(1e-12));
  }
  SUBCASE("exponential shot noise settles at lambda/eta") {
    auto t = cp_triplet(1.0);
    t.control.time = TimeControl::lebesgue(0.0, 20.0);
    const auto grid = sim::GridSpec::uniform(0.0, 20.0, 80, t.control.space.cells);
    const auto kernel = KernelSpec::exponential(1.0);
    const QueryPoint q{20.0, {0.0}};
    const int n = 10000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto real = sim::simulate_levy_basis(t, grid, 0.0, rng::derive_seed(23, i));
      const double y = evaluate_ambit(kernel, nullptr, real, {&q, 1})[0];
      sum += y;
      sumsq += y * y;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) <= 3.0 * se + 1e-6);
  }
  SUBCASE("a single heat jump reproduces the Green function") {
    auto t = cp_triplet(1.0);
    const auto grid = sim::GridSpec::uniform(0.0, 1.0, 4, t.control.space.cells);
    sim::BasisRealization real;
    real.grid = grid;
    real.gaussian.assign(grid.n_cells(), 0.0);
    real.drift.assign(grid.n_cells(), 0.0);
    real.small_var.assign(grid.n_cells(), 0.0);
    real.small_bias.assign(grid.n_cells(), 0.0);
    real.jumps.push_back({0.25, grid.cell_index(1, 0), 1.0});
    const auto kernel = KernelSpec::heat(1);
    const QueryPoint q{0.9, {0.4}};
    const auto vals = evaluate_ambit(kernel, nullptr, real, {&q, 1});
    const double x[1] = {0.4};
    const double y[1] = {0.0};
    CHECK(vals[0] ==
          doctest::Approx(heat_green(0.9, 0.25, {x, 1}, {y, 1}, 1)).epsilon(1e-14));
  }
  SUBCASE("volatility modulation scales the cell and jump terms") {
    auto t = cp_triplet(2.0);
    t.drift = measure::constant_field(0.1);
    const auto grid = sim::GridSpec::uniform(0.0, 1.0, 4, t.control.space.cells);
    const auto real = sim::simulate_levy_basis(t, grid, 0.0, 63);
    const auto kernel = KernelSpec::exponential(1.0);
    const QueryPoint q{1.0, {0.0}};
    const double base = evaluate_ambit(kernel, nullptr, real, {&q, 1})[0];
    const auto sigma = measure::constant_field(2.0);
    const double scaled = evaluate_ambit(kernel, sigma, real, {&q, 1})[0];
    CHECK(scaled == doctest::Approx(2.0 * base).epsilon(1e-13));
  }
  SUBCASE("evaluation is linear in the realization") {
    auto t = cp_triplet(3.0);
    const auto grid = sim::GridSpec::uniform(0.0, 1.0, 4, t.control.space.cells);
    auto a = sim::simulate_levy_basis(t, grid, 0.0, 41);
    auto b = sim::simulate_levy_basis(t, grid, 0.0, 42);
    sim::BasisRealization mixed = a;
    for (int cell = 0; cell < grid.n_cells(); ++cell) {
      mixed.gaussian[cell] += b.gaussian[cell];
      mixed.drift[cell] += b.drift[cell];
    }
    mixed.jumps.insert(mixed.jumps.end(), b.jumps.begin(), b.jumps.end());
    const auto kernel = KernelSpec::exponential(0.7);
    const QueryPoint q{1.0, {0.0}};
    const double va = evaluate_ambit(kernel, nullptr, a, {&q, 1})[0];
    const double vb = evaluate_ambit(kernel, nullptr, b, {&q, 1})[0];
    const double vm = evaluate_ambit(kernel, nullptr, mixed, {&q, 1})[0];
    CHECK(vm == doctest::Approx(va + vb).epsilon(1e-12));
  }
  SUBCASE("exponential kernels satisfy the OU recursion path by path") {
    auto t = cp_triplet(2.0);
    const auto grid = sim::GridSpec::uniform(0.0, 1.0, 8, t.control.space.cells);
    const auto real = sim::simulate_levy_basis(t, grid, 0.0, 55);
    const double eta = 1.3;
    const auto kernel = KernelSpec::exponential(eta);
    const QueryPoint q1{0.5, {0.0}};
    const QueryPoint q2{0.75, {0.0}};
    const double y1 = evaluate_ambit(kernel, nullptr, real, {&q1, 1})[0];
    const double y2 = evaluate_ambit(kernel, nullptr, real, {&q2, 1})[0];
    double new_terms = 0.0;
    for (const auto& j : real.jumps) {
      if (j.t > 0.5 && j.t <= 0.75) {
        new_terms += std::exp(-eta * (0.75 - j.t)) * j.size;
      }
    }
    for (int cell = 0; cell < grid.n_cells(); ++cell) {
      const int step = grid.step_of(cell);
      const double sc = 0.5 * (grid.step_lo(step) + grid.step_hi(step));
      if (sc > 0.5 && sc <= 0.75) {
        new_terms += std::exp(-eta * (0.75 - sc)) *
                     (real.gaussian[cell] + real.drift[cell]);
      }
    }
    CHECK(y2 == doctest::Approx(std::exp(-eta * 0.25) * y1 + new_terms)
                    .epsilon(1e-12));
  }
}

TEST_CASE("classification against the cosine covariance") {
  const quad::Fn1 f = [](double z) { return 0.5 * (1.0 + std::cos(z)); };
  const quad::Fn1 f_one = [](double) { return 1.0; };

  SUBCASE("t sin(2x) lies in the improper class only") {
    const auto H = [](double t, double x) {
      return (x >= 0.0 && x <= 2.0 * M_PI) ? t * std::sin(2.0 * x) : 0.0;
    };
    CHECK(classify_colored_example(H, f, quad::Axis{0.0, kInf}, 0.0,
                                   2.0 * M_PI) == ColoredClass::InL0Only);
  }
  SUBCASE("a bounded compactly supported integrand is strictly integrable") {
    const auto H = [](double t, double x) {
      return (t <= 1.0 && x >= 0.0 && x <= 1.0) ? 1.0 : 0.0;
    };
    CHECK(classify_colored_example(H, f_one, quad::Axis{0.0, kInf}, 0.0, 1.0) ==
          ColoredClass::InL10);
  }
  SUBCASE("a constant over all time is in neither class") {
    const auto H = [](double, double) { return 1.0; };
    CHECK(classify_colored_example(H, f_one, quad::Axis{0.0, kInf}, 0.0, 1.0) ==
          ColoredClass::NotInL0);
  }
}

TEST_CASE("tabulated kernels interpolate the lag") {
  const auto k = KernelSpec::tabulated({0.0, 1.0, 2.0}, {1.0, 0.5, 0.25});
  const double x[1] = {0.0};
  CHECK(k(3.0, 2.0, {x, 1}, {x, 1}) == doctest::Approx(0.5));
  CHECK(k(3.0, 1.5, {x, 1}, {x, 1}) == doctest::Approx(0.375));
  CHECK(k(3.0, 3.5, {x, 1}, {x, 1}) == 0.0);   // acausal
  CHECK(k(10.0, 1.0, {x, 1}, {x, 1}) == 0.0);  // beyond the table
}

TEST_CASE("refinement study reports a shrinking discretisation drift") {
  auto t = cp_triplet(1.0);
  t.gaussian = GaussianPart::orthogonal(measure::constant_field(0.5));
  t.tau = TruncationFunction::standard(1.0);
  const auto kernel = KernelSpec::exponential(1.0);
  const auto report = refinement_study(kernel, nullptr, t, 1.0, {1.0, {0.0}}, 3,
                                       8, 3);
  REQUIRE(report.values.size() == 4);
  const double d1 = std::abs(report.values[1] - report.values[0]);
  CHECK(report.last_delta <= d1 + 1e-12);
}

}  // TEST_SUITE
