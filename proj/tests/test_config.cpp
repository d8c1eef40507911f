#include <doctest.h>

#include <cmath>

#include "ambit/config.hpp"

using namespace ambit;
using namespace ambit::io;

#ifndef AMBIT_CONFIG_DIR
#define AMBIT_CONFIG_DIR "configs"
#endif

namespace {
const std::string kConfigs = AMBIT_CONFIG_DIR;
}

TEST_SUITE("config") {

TEST_CASE("toml subset parsing") {
  const auto doc = parse_toml(R"(
# comment
title = "demo"  # trailing comment
count = 10
rate = 2.5e-1
limit = inf
big = 1_000
flag = true
values = [1.0, 2.0, 3.0]
names = ["a", "b"]

[section.sub]
key = "nested"

[[list.entry]]
size = 1.0

[[list.entry]]
size = -2.0
)");
  CHECK(doc.string("title") == "demo");
  CHECK(doc.number("count") == 10.0);
  CHECK(doc.number("rate") == doctest::Approx(0.25));
  CHECK(std::isinf(doc.number("limit")));
  CHECK(doc.number("big") == 1000.0);
  CHECK(doc.boolean_or("flag", false));
  CHECK(doc.numbers("values") == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(doc.at("names").array.size() == 2);
  CHECK(doc.at("section").at("sub").string("key") == "nested");
  const auto& entries = doc.at("list").at("entry");
  REQUIRE(entries.kind == TomlValue::Kind::TableArray);
  REQUIRE(entries.array.size() == 2);
  CHECK(entries.array[1].number("size") == -2.0);
}

TEST_CASE("toml errors carry line positions") {
  CHECK_THROWS_AS(parse_toml("key ="), TomlError);
  CHECK_THROWS_AS(parse_toml("= 3"), TomlError);
  CHECK_THROWS_AS(parse_toml("[unclosed"), TomlError);
  CHECK_THROWS_AS(parse_toml("x = nonsense"), TomlError);
  CHECK_THROWS_AS(parse_toml("a = [1, \"two\""), TomlError);
}

TEST_CASE("the bundled compensated-Poisson triplet loads and validates") {
  const auto t = load_triplet(kConfigs + "/compensated_poisson.toml");
  CHECK(measure::validate_triplet(t).empty());
  const double origin[1] = {0.0};
  CHECK(t.drift(0.5, {origin, 1}) == -1.0);
  const auto spec = t.jumps(0.5, {origin, 1});
  REQUIRE(spec.atoms.size() == 1);
  CHECK(spec.atoms[0].size == 1.0);
  CHECK(spec.atoms[0].mass == 1.0);
  CHECK(std::isinf(t.control.time.t1));
  CHECK(t.tau.kind == measure::TruncationFunction::Kind::Standard);
}

TEST_CASE("the bundled colored triplet is colored and correctly flagged") {
  const auto t = load_triplet(kConfigs + "/colored_cosine.toml");
  CHECK(t.gaussian.kind == measure::GaussianPart::Kind::Colored);
  CHECK(!t.flags.orthogonal);
  CHECK(measure::validate_triplet(t).empty());
  CHECK(t.gaussian.f(0.0) == doctest::Approx(1.0));
  CHECK(t.gaussian.f(M_PI) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("the stable-density triplet carries its atoms and density") {
  const auto t = load_triplet(kConfigs + "/stable_tempered.toml");
  CHECK(measure::validate_triplet(t).empty());
  const double origin[1] = {0.0};
  const auto spec = t.jumps(0.5, {origin, 1});
  REQUIRE(spec.density.has_value());
  CHECK(spec.density->alpha0 == doctest::Approx(1.5));
  CHECK(spec.density->rho(0.5) == doctest::Approx(std::pow(0.5, -2.5)));
  REQUIRE(spec.atoms.size() == 1);
  CHECK(spec.atoms[0].size == 2.0);
}

TEST_CASE("integrand configs resolve to callables") {
  const auto H = load_integrand(kConfigs + "/inv_one_plus_t.toml");
  CHECK(H.effective(1.0, {}) == doctest::Approx(0.5));
  const auto E = load_integrand(kConfigs + "/exp_decay.toml");
  CHECK(E.effective(2.0, {}) == doctest::Approx(std::exp(-2.0)));
  const auto S = load_integrand(kConfigs + "/t_sin2x.toml");
  const double x[1] = {M_PI / 4.0};
  CHECK(S.effective(3.0, {x, 1}) == doctest::Approx(3.0));
}

TEST_CASE("truncation strings") {
  CHECK(parse_tau("zero").is_zero());
  const auto t2 = parse_tau("standard:2.5");
  CHECK(t2.bound == 2.5);
  CHECK(t2(1.0) == 1.0);
  CHECK(t2(3.0) == 0.0);
  CHECK_THROWS_AS(parse_tau("nonsense"), ConfigError);
  CHECK_THROWS_AS(parse_tau("standard:-1"), ConfigError);
}

TEST_CASE("field catalog errors are reported") {
  const auto doc = parse_toml("[drift]\nfunction = \"no_such\"\n");
  CHECK_THROWS_AS(triplet_from_toml(doc), ConfigError);
}

TEST_CASE("probability spaces and time densities") {
  const auto doc = parse_toml(R"(
[control.time]
kind = "density"
t0 = 0.0
t1 = 2.0
function = "exp_decay"
rate = 1.0

[control.space]
kind = "probability"
weights = [0.25, 0.75]
centers = [0.0, 1.0]
)");
  const auto t = triplet_from_toml(doc);
  CHECK(t.control.space.kind == measure::SpaceControl::Kind::Probability);
  CHECK(t.control.time.kind == measure::TimeControl::Kind::Density);
  CHECK(t.control.mass(0.0, 2.0) ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-8));

  auto bad = parse_toml(R"(
[control.space]
kind = "probability"
weights = [0.25, 0.25]
)");
  CHECK_THROWS_AS(triplet_from_toml(bad), ConfigError);
}

}  // TEST_SUITE
