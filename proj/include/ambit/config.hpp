#pragma once

#include <string>

#include "ambit/integrability.hpp"
#include "ambit/toml.hpp"
#include "ambit/triplet.hpp"

namespace ambit::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named scalar field (t,x) -> real from a config node. Either a literal
/// number under `key`, or function = "<name>" with parameters. Catalog:
/// constant, zero, one, inv_one_plus_t, power_one_plus_t(exponent),
/// exp_decay(rate), t_times_sin2x, sin2x, abs_sin2x,
/// indicator(t0,t1[,x0,x1]).
measure::TimeSpaceFn field_from(const TomlValue& node, const std::string& key);

/// Spatial covariance kernel catalog: one_plus_cos_half, constant(value),
/// gaussian(scale), fractional(hurst).
std::function<double(double)> covariance_from(const TomlValue& node);

measure::CharacteristicTriplet triplet_from_toml(const TomlValue& doc);
measure::CharacteristicTriplet load_triplet(const std::string& path);

integrability::IntegrandSpec integrand_from_toml(const TomlValue& doc);
integrability::IntegrandSpec load_integrand(const std::string& path);

/// "zero" or "standard:B".
measure::TruncationFunction parse_tau(const std::string& text);

}  // namespace ambit::io
