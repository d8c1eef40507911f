#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace ambit::selftest {

struct Options {
  std::string config_dir;  // directory holding the bundled TOML configs
  int threads = 2;
  std::uint64_t seed = 20240801;
};

/// Runs the full acceptance suite, printing one pass/fail line per
/// criterion. Returns the number of failed criteria.
int run_all(const Options& opts, std::ostream& out);

}  // namespace ambit::selftest
