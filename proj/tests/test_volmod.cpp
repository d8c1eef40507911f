#include <doctest.h>

#include <cmath>
#include <cstring>

#include "ambit/volmod.hpp"

using namespace ambit;
using namespace ambit::volmod;
using measure::JumpMeasureSpec;

TEST_SUITE("volmod") {

TEST_CASE("phi_max closed forms and monotonicity") {
  const std::pair<double, double> cases[] = {{1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}};
  for (const auto& [m, eta] : cases) {
    const auto r = phi_max(JumpMeasureSpec::single_atom(1.0, m), eta, 1e-10);
    REQUIRE(r.finite);
    CHECK(r.value == doctest::Approx(std::exp(eta / m) - 1.0).epsilon(1e-8));
    CHECK(r.residual < 1e-8);
  }
  double prev = 0.0;
  for (double eta : {1.0, 2.0, 4.0}) {
    const auto r = phi_max(JumpMeasureSpec::single_atom(1.0, 1.0), eta);
    CHECK(r.value > prev);
    prev = r.value;
  }
}

TEST_CASE("no finite stationarity boundary without jumps") {
  const auto r = phi_max(JumpMeasureSpec::zero(), 1.0);
  CHECK(!r.finite);
  CHECK(std::isinf(r.value));
  CHECK(!r.diagnostic.empty());
}

TEST_CASE("phi = 0 decouples the volatility into a deterministic relaxation") {
  CogarchParams p;
  p.beta = 2.0;
  p.eta = 0.5;
  p.phi = 0.0;
  p.driver = JumpMeasureSpec::single_atom(1.0, 1.0);
  const auto path = simulate_cogarch(p, 10.0, 3, 0.25, 7.0);
  const double mean = p.beta / p.eta;
  for (size_t i = 0; i < path.t.size(); ++i) {
    const double expect = mean + (7.0 - mean) * std::exp(-p.eta * path.t[i]);
    CHECK(path.V[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("volatility jumps equal phi times the squared price jumps") {
  CogarchParams p;
  p.beta = 1.0;
  p.eta = 1.0;
  p.phi = 0.2;
  p.driver = JumpMeasureSpec::single_atom(1.0, 1.0);
  const auto path = simulate_cogarch(p, 100.0, 11, 0.5);
  REQUIRE(!path.jump_log.empty());
  for (const auto& j : path.jump_log) {
    const double rhs = p.phi * j.dg * j.dg;
    CHECK(std::abs(j.dv - rhs) <=
          4.0 * std::numeric_limits<double>::epsilon() * std::abs(j.dv));
  }
}

TEST_CASE("time average of the volatility approaches the stationary mean") {
  CogarchParams p;
  p.beta = 1.0;
  p.eta = 1.0;
  p.phi = 0.2;
  p.driver = JumpMeasureSpec::single_atom(1.0, 1.0);
  const int n_paths = 60;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n_paths; ++i) {
    const auto path = simulate_cogarch(p, 120.0, rng::derive_seed(91, i), 0.5);
    const double avg = time_average_v(path, p.beta, p.eta, 20.0, 120.0);
    sum += avg;
    sumsq += avg * avg;
  }
  const double mean = sum / n_paths;
  const double se =
      std::sqrt((sumsq - sum * sum / n_paths) / (n_paths - 1) / n_paths);
  CHECK(std::abs(mean - 1.25) <= 4.0 * se);
}

TEST_CASE("superposition path agrees with its moving-average form") {
  SupCogarchParams p;
  p.beta = 1.0;
  p.eta = 1.0;
  p.pi = {{0.1, 0.6}, {0.3, 0.4}};
  p.driver = JumpMeasureSpec::single_atom(1.0, 1.0);
  const auto path = simulate_supcogarch(p, 40.0, 19, 0.5);
  double worst = 0.0;
  for (size_t i = 0; i < path.t.size(); ++i) {
    worst = std::max(worst, std::abs(path.vbar_sde[i] - path.vbar_closed[i]));
  }
  CHECK(worst < 1e-8);
  // Every jump feeds Vbar through its marked component.
  for (const auto& j : path.jump_log) {
    CHECK((j.mark == 0.1 || j.mark == 0.3));
    CHECK(j.dv == doctest::Approx(j.mark * j.v_pre * j.size * j.size));
  }
}

TEST_CASE("degenerate mixing law reproduces the plain model bitwise") {
  SupCogarchParams sp;
  sp.beta = 1.0;
  sp.eta = 1.0;
  sp.pi = {{0.2, 1.0}};
  sp.driver = JumpMeasureSpec::single_atom(1.0, 1.0);
  CogarchParams cp;
  cp.beta = 1.0;
  cp.eta = 1.0;
  cp.phi = 0.2;
  cp.driver = sp.driver;
  const auto sup = simulate_supcogarch(sp, 30.0, 321, 0.25);
  const auto cog = simulate_cogarch(cp, 30.0, 321, 0.25);
  REQUIRE(sup.t.size() == cog.t.size());
  for (size_t i = 0; i < sup.t.size(); ++i) {
    CHECK(sup.t[i] == cog.t[i]);
    CHECK(std::memcmp(&sup.vbar_sde[i], &cog.V[i], sizeof(double)) == 0);
  }
}

TEST_CASE("no jumps leaves the superposition on the deterministic relaxation") {
  SupCogarchParams p;
  p.beta = 1.5;
  p.eta = 0.75;
  p.pi = {{0.2, 1.0}};
  p.driver = JumpMeasureSpec::zero();
  const auto path = simulate_supcogarch(p, 5.0, 2, 0.25);
  for (size_t i = 0; i < path.t.size(); ++i) {
    CHECK(path.vbar_sde[i] == doctest::Approx(p.beta / p.eta).epsilon(1e-12));
  }
}

TEST_CASE("inadmissible mixing atoms are rejected") {
  SupCogarchParams p;
  p.beta = 1.0;
  p.eta = 1.0;
  p.pi = {{2.0, 1.0}};  // phi_max = e - 1 < 2
  p.driver = JumpMeasureSpec::single_atom(1.0, 1.0);
  CHECK_THROWS_AS(simulate_supcogarch(p, 5.0, 1, 0.25), InadmissiblePhi);
}

TEST_CASE("existence ladder for the superposition") {
  SUBCASE("no jumps converges to zero") {
    SupCogarchParams p;
    p.beta = 1.0;
    p.eta = 1.0;
    p.pi = {{0.2, 1.0}};
    p.driver = JumpMeasureSpec::zero();
    const double ladder[] = {5.0, 10.0};
    const auto v = check_supcog_existence(p, ladder, 10, 4);
    REQUIRE(v.finite());
    CHECK(v.value == 0.0);
  }
  SUBCASE("phi = 0 makes the integrand vanish") {
    SupCogarchParams p;
    p.beta = 1.0;
    p.eta = 1.0;
    p.pi = {{0.0, 1.0}};
    p.driver = JumpMeasureSpec::single_atom(1.0, 1.0);
    const double ladder[] = {5.0, 10.0};
    const auto v = check_supcog_existence(p, ladder, 10, 4);
    REQUIRE(v.finite());
    CHECK(v.value == 0.0);
  }
  SUBCASE("the standard example converges on nearly all paths") {
    SupCogarchParams p;
    p.beta = 1.0;
    p.eta = 1.0;
    p.pi = {{0.2, 1.0}};
    p.driver = JumpMeasureSpec::single_atom(1.0, 1.0);
    const double ladder[] = {10.0, 20.0, 40.0, 80.0};
    const auto v = check_supcog_existence(p, ladder, 100, 4);
    REQUIRE(v.finite());
    CHECK(v.value > 0.0);
    CHECK(v.reason.find("100/100") != std::string::npos);
  }
}

}  // TEST_SUITE
