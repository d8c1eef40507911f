#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ambit/pushforward.hpp"

using namespace ambit;
using namespace ambit::pushforward;
using measure::CharacteristicTriplet;
using measure::GaussianPart;
using measure::JumpMeasureSpec;
using measure::SpaceControl;
using measure::TimeControl;
using measure::TruncationFunction;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

CharacteristicTriplet base_triplet() {
  CharacteristicTriplet t;
  t.drift = measure::constant_field(0.3);
  t.gaussian = GaussianPart::orthogonal(measure::constant_field(0.5));
  t.jumps = [](double, std::span<const double>) {
    return JumpMeasureSpec::single_atom(0.5, 1.0);
  };
  t.control.time = TimeControl::lebesgue(0.0, 1.0);
  t.control.space = SpaceControl::single_point();
  t.tau = TruncationFunction::standard(1.0);
  return t;
}

}  // namespace

TEST_SUITE("pushforward") {

TEST_CASE("H = 1 over a single spatial point is the identity") {
  const auto t = base_triplet();
  const auto H = integrability::IntegrandSpec::of_time([](double) { return 1.0; });
  const auto ns = pushforward_characteristics(t, H, t.tau);
  const double origin[1] = {0.0};
  const std::span<const double> x(origin, 1);
  for (double tt : {0.1, 0.5, 0.9}) {
    CHECK(ns.drift(tt) == doctest::Approx(t.drift(tt, x)).epsilon(1e-12));
    CHECK(ns.gaussian(tt) == doctest::Approx(0.5).epsilon(1e-12));
    const auto spec = ns.jumps(tt);
    REQUIRE(spec.atoms.size() == 1);
    CHECK(spec.atoms[0].size == doctest::Approx(0.5));
    CHECK(spec.atoms[0].mass == doctest::Approx(1.0));
  }
}

TEST_CASE("constant H scales jump sizes exactly under zero truncation") {
  auto t = base_triplet();
  t.drift = measure::constant_field(0.0);
  t.gaussian = GaussianPart::none();
  t.jumps = [](double, std::span<const double>) {
    return JumpMeasureSpec::single_atom(1.0, 2.0);
  };
  t.tau = TruncationFunction::zero();
  const auto H = integrability::IntegrandSpec::of_time([](double) { return 2.5; });
  const auto ns = pushforward_characteristics(t, H, TruncationFunction::zero());
  const auto spec = ns.jumps(0.4);
  REQUIRE(spec.atoms.size() == 1);
  CHECK(spec.atoms[0].size == doctest::Approx(2.5));
  CHECK(spec.atoms[0].mass == doctest::Approx(2.0));
  CHECK(ns.drift(0.4) == 0.0);
}

TEST_CASE("exponential integrand against the unit compound Poisson") {
  CharacteristicTriplet t;
  t.drift = measure::constant_field(0.0);
  t.gaussian = GaussianPart::none();
  t.jumps = [](double, std::span<const double>) {
    return JumpMeasureSpec::single_atom(1.0, 1.0);
  };
  t.control.time = TimeControl::lebesgue(0.0, kInf);
  t.control.space = SpaceControl::single_point();
  t.tau = TruncationFunction::standard(1.0);
  const auto H = integrability::IntegrandSpec::of_time(
      [](double s) { return std::exp(-s); });
  const auto ns = pushforward_characteristics(t, H, t.tau);
  for (double tt : {0.5, 1.0, 3.0}) {
    // tau(e^{-t}) - e^{-t} tau(1) = e^{-t} for t > 0
    CHECK(ns.drift(tt) == doctest::Approx(std::exp(-tt)).epsilon(1e-10));
    const auto spec = ns.jumps(tt);
    REQUIRE(spec.atoms.size() == 1);
    CHECK(spec.atoms[0].size == doctest::Approx(std::exp(-tt)));
    CHECK(spec.atoms[0].mass == doctest::Approx(1.0));
  }
}

TEST_CASE("pushforward rejects non-integrable integrands") {
  CharacteristicTriplet t;
  t.drift = measure::constant_field(0.0);
  t.gaussian = GaussianPart::none();
  t.jumps = [](double, std::span<const double>) {
    return JumpMeasureSpec::single_atom(1.0, 1.0);
  };
  t.control.time = TimeControl::lebesgue(0.0, kInf);
  t.control.space = SpaceControl::single_point();
  t.tau = TruncationFunction::standard(1.0);
  const auto H = integrability::IntegrandSpec::of_time([](double) { return 1.0; });
  CHECK_THROWS_AS(pushforward_characteristics(t, H, t.tau), NotIntegrableError);
}

TEST_CASE("retruncation commutes with the pushforward") {
  const auto t = base_triplet();
  const auto H = integrability::IntegrandSpec::of_time(
      [](double s) { return std::exp(-s); });
  const auto tau2 = TruncationFunction::standard(2.0);
  const auto push_then_re = pushforward_characteristics(t, H, tau2);
  const auto re_then_push =
      pushforward_characteristics(measure::retruncate(t, tau2), H, tau2);
  for (double tt : {0.1, 0.4, 0.8}) {
    CHECK(push_then_re.drift(tt) ==
          doctest::Approx(re_then_push.drift(tt)).epsilon(1e-8));
  }
}

TEST_CASE("jump-kernel image preserves mass per time slice") {
  CharacteristicTriplet t = base_triplet();
  t.control.space = SpaceControl::finite_grid({{0, {0.0}, 0.4}, {1, {1.0}, 0.6}});
  t.jumps = [](double, std::span<const double> x) {
    JumpMeasureSpec s;
    measure::JumpDensity den;
    const double scale = 1.0 + x[0];
    den.rho = [scale](double y) {
      return scale * std::pow(std::abs(y), -2.5) * (std::abs(y) <= 1.0 ? 1.0 : 0.0);
    };
    den.support_lo = -1.0;
    den.support_hi = 1.0;
    den.alpha0 = 1.5;
    s.density = den;
    s.atoms.push_back({2.0, 0.3});
    return s;
  };
  const auto H = integrability::IntegrandSpec::of(
      [](double, std::span<const double> x) { return 1.0 + 0.5 * x[0]; });
  const auto ns = pushforward_characteristics(t, H, t.tau, {}, true);

  const double origin[1] = {0.0};
  const double one[1] = {1.0};
  // Restricted to |y| > 0.05 so both sides are finite-activity.
  const auto tail_mass = [&](const JumpMeasureSpec& spec, double eps) {
    quad::QuadConfig cfg;
    cfg.rel_tol = 1e-10;
    const auto v = integrate_jump(
        [eps](double y) { return std::abs(y) > eps ? 1.0 : 0.0; }, spec, cfg);
    REQUIRE(v.finite());
    return v.value;
  };
  const double t0 = 0.5;
  const double expect = 0.4 * tail_mass(t.jumps(t0, {origin, 1}), 0.05) +
                        0.6 * tail_mass(t.jumps(t0, {one, 1}), 0.05 / 1.5);
  // Image sizes are h*y with h = 1 and 1.5 on the two cells; the cutoffs
  // above make the restricted masses correspond cell by cell.
  const double got = tail_mass(ns.jumps(t0), 0.05);
  CHECK(got == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("simple integrals over cell-aligned regions") {
  auto t = base_triplet();
  t.control.space = SpaceControl::finite_grid({{0, {0.0}, 0.5}, {1, {1.0}, 0.5}});
  const auto grid = sim::GridSpec::uniform(0.0, 1.0, 4, t.control.space.cells);
  const auto real = sim::simulate_levy_basis(t, grid, 0.0, 99);

  const sim::GridRegion whole{0.0, 1.0, {}};
  const WeightedRegion total[] = {{1.0, whole}};
  CHECK(simple_integral(total, real) == doctest::Approx(real.total_mass()));
  double by_cells = 0.0;
  for (int cell = 0; cell < grid.n_cells(); ++cell) {
    by_cells += real.cell_value(cell);
  }
  CHECK(by_cells == doctest::Approx(real.total_mass()).epsilon(1e-12));

  const sim::GridRegion first_half{0.0, 0.5, {}};
  const sim::GridRegion second_half{0.5, 1.0, {}};
  const WeightedRegion combo[] = {{2.0, first_half}, {-1.0, second_half}};
  const double direct = 2.0 * sim::region_mass(real, first_half) -
                        sim::region_mass(real, second_half);
  CHECK(simple_integral(combo, real) == doctest::Approx(direct));

  // Refinement invariance: 1*whole equals the sum over the two halves.
  const WeightedRegion refined[] = {{1.0, first_half}, {1.0, second_half}};
  CHECK(simple_integral(refined, real) ==
        doctest::Approx(simple_integral(total, real)).epsilon(1e-13));

  CHECK_THROWS_AS(sim::region_mass(real, sim::GridRegion{0.0, 0.3, {}}),
                  sim::RegionNotAligned);
}

TEST_CASE("dominated simple-integrand approximations converge per realization") {
  // Piecewise-constant approximations of a bounded integrand, evaluated as
  // simple integrals over coarser and coarser block regions, approach the
  // cell-resolution integral on a fixed realization.
  auto t = base_triplet();
  const int fine_steps = 32;
  const auto grid = sim::GridSpec::uniform(0.0, 1.0, fine_steps,
                                           t.control.space.cells);
  const auto real = sim::simulate_levy_basis(t, grid, 0.0, 1234);
  const auto H = [](double s) { return std::exp(-s); };

  double fine = 0.0;
  for (int step = 0; step < fine_steps; ++step) {
    const double sc = 0.5 * (grid.step_lo(step) + grid.step_hi(step));
    fine += H(sc) * sim::region_mass(real, sim::GridRegion{grid.step_lo(step),
                                                           grid.step_hi(step),
                                                           {}});
  }

  auto gap_at = [&](int blocks) {
    std::vector<WeightedRegion> simple;
    const double width = 1.0 / blocks;
    for (int b = 0; b < blocks; ++b) {
      simple.push_back({H((b + 0.5) * width),
                        sim::GridRegion{b * width, (b + 1) * width, {}}});
    }
    return std::abs(simple_integral(simple, real) - fine);
  };
  // At block = cell resolution the simple integrand IS the discretised
  // integrand, so the approximations close the gap entirely.
  CHECK(gap_at(32) <= 1e-12);
  CHECK(gap_at(16) < gap_at(2));
  CHECK(gap_at(16) < 0.05);
}

TEST_CASE("path integral basics") {
  auto t = base_triplet();
  SUBCASE("zero integrand gives the zero path") {
    const auto H = integrability::IntegrandSpec::of_time([](double) { return 0.0; });
    const auto path = simulate_path_integral(H, t, 1.0, 8, 5);
    for (const auto& [tt, v] : path) CHECK(v == 0.0);
  }
  SUBCASE("linearity in the integrand per fixed realization") {
    const auto H1 = integrability::IntegrandSpec::of_time(
        [](double s) { return std::exp(-s); });
    const auto H2 = integrability::IntegrandSpec::of_time(
        [](double s) { return s; });
    const auto Hmix = integrability::IntegrandSpec::of_time(
        [](double s) { return 2.0 * std::exp(-s) - 3.0 * s; });
    const auto p1 = simulate_path_integral(H1, t, 1.0, 8, 5);
    const auto p2 = simulate_path_integral(H2, t, 1.0, 8, 5);
    const auto pm = simulate_path_integral(Hmix, t, 1.0, 8, 5);
    for (size_t i = 0; i < pm.size(); ++i) {
      CHECK(pm[i].second ==
            doctest::Approx(2.0 * p1[i].second - 3.0 * p2[i].second)
                .epsilon(1e-10));
    }
  }
}

TEST_CASE("endpoint of the Brownian path integral has unit variance") {
  CharacteristicTriplet t;
  t.drift = measure::constant_field(0.0);
  t.gaussian = GaussianPart::orthogonal(measure::constant_field(1.0));
  t.jumps = [](double, std::span<const double>) { return JumpMeasureSpec::zero(); };
  t.control.time = TimeControl::lebesgue(0.0, 1.0);
  t.control.space = SpaceControl::single_point();
  t.tau = TruncationFunction::standard(1.0);
  const auto H = integrability::IntegrandSpec::of_time([](double) { return 1.0; });
  const int n = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto path = simulate_path_integral(H, t, 1.0, 1, rng::derive_seed(21, i));
    const double v = path.back().second;
    sum += v;
    sumsq += v * v;
  }
  const double var = (sumsq - sum * sum / n) / (n - 1);
  const double se = std::sqrt(2.0 / (n - 1));
  CHECK(std::abs(var - 1.0) <= 3.0 * se);
}

TEST_CASE("compensated-Poisson boundary endpoints are Cauchy in probability across horizons") {
  CharacteristicTriplet t;
  t.drift = measure::constant_field(-1.0);
  t.gaussian = GaussianPart::none();
  t.jumps = [](double, std::span<const double>) {
    return JumpMeasureSpec::single_atom(1.0, 1.0);
  };
  t.control.time = TimeControl::lebesgue(0.0, kInf);
  t.control.space = SpaceControl::single_point();
  t.tau = TruncationFunction::standard(1.0);
  const auto H = integrability::IntegrandSpec::of_time(
      [](double s) { return 1.0 / (1.0 + s); });
  const double horizons[] = {10.0, 100.0, 1000.0};
  const int n_paths = 120;
  std::vector<std::vector<double>> endpoints(3);
  for (int p = 0; p < n_paths; ++p) {
    // One realization per (horizon, path); the variance of the difference
    // between consecutive horizons shrinks like 1/T.
    for (int hzi = 0; hzi < 3; ++hzi) {
      const int steps = static_cast<int>(horizons[hzi] * 4);
      const auto path = simulate_path_integral(H, t, horizons[hzi], steps,
                                               rng::derive_seed(77, p));
      endpoints[hzi].push_back(path.back().second);
    }
  }
  auto median_abs_diff = [&](int a, int b) {
    std::vector<double> diffs;
    for (int p = 0; p < n_paths; ++p) {
      diffs.push_back(std::abs(endpoints[a][p] - endpoints[b][p]));
    }
    std::nth_element(diffs.begin(), diffs.begin() + n_paths / 2, diffs.end());
    return diffs[n_paths / 2];
  };
  const double d01 = median_abs_diff(0, 1);
  const double d12 = median_abs_diff(1, 2);
  CHECK(d12 < d01);
  CHECK(d12 < 0.1);
}

TEST_CASE("characteristic-function distances") {
  SUBCASE("pure drift with H = 1 is deterministic to machine precision") {
    CharacteristicTriplet t;
    t.drift = measure::constant_field(1.0);
    t.gaussian = GaussianPart::none();
    t.jumps = [](double, std::span<const double>) { return JumpMeasureSpec::zero(); };
    t.control.time = TimeControl::lebesgue(0.0, kInf);
    t.control.space = SpaceControl::single_point();
    t.tau = TruncationFunction::standard(1.0);
    const auto H = integrability::IntegrandSpec::of_time([](double) { return 1.0; });
    const double us[] = {0.5, 1.0};
    const auto res = cf_distance(H, t, t.tau, 1.0, us, 64, 3, 64, 1);
    CHECK(res.max_distance < 1e-9);
  }
  SUBCASE("gaussian endpoint matches exp(-u^2/2)") {
    CharacteristicTriplet t;
    t.drift = measure::constant_field(0.0);
    t.gaussian = GaussianPart::orthogonal(measure::constant_field(1.0));
    t.jumps = [](double, std::span<const double>) { return JumpMeasureSpec::zero(); };
    t.control.time = TimeControl::lebesgue(0.0, kInf);
    t.control.space = SpaceControl::single_point();
    t.tau = TruncationFunction::standard(1.0);
    const auto H = integrability::IntegrandSpec::of_time([](double) { return 1.0; });
    const double us[] = {0.5, 1.0, 2.0};
    const auto res = cf_distance(H, t, t.tau, 1.0, us, 20000, 9, 8, 2);
    for (const auto& row : res.rows) {
      CHECK(std::abs(row.theoretical -
                     std::exp(std::complex<double>(-0.5 * row.u * row.u, 0.0))) <
            1e-8);
      CHECK(row.z < 3.0);
    }
  }
}

TEST_CASE("window exponent matches an independent Simpson oracle") {
  CharacteristicTriplet t;
  t.drift = measure::constant_field(0.0);
  t.gaussian = GaussianPart::none();
  t.jumps = [](double, std::span<const double>) {
    return JumpMeasureSpec::single_atom(1.0, 1.0);
  };
  t.control.time = TimeControl::lebesgue(0.0, kInf);
  t.control.space = SpaceControl::single_point();
  t.tau = TruncationFunction::zero();
  const auto H = integrability::IntegrandSpec::of_time(
      [](double s) { return std::exp(-s); });
  const auto ns = pushforward_characteristics(t, H, TruncationFunction::zero());
  const double T = 5.0;
  for (double u : {0.5, 1.0, 2.0}) {
    const auto psi = exponent_over_window(ns, 0.0, T, u);
    // Simpson oracle for int_0^T (e^{i u e^{-t}} - 1) dt.
    const int n = 4000;
    std::complex<double> acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double tt = T * i / n;
      const std::complex<double> val =
          std::exp(std::complex<double>(0.0, u * std::exp(-tt))) - 1.0;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * val;
    }
    acc *= T / (3.0 * n);
    CHECK(std::abs(psi - acc) < 1e-6);
  }
}

}  // TEST_SUITE
