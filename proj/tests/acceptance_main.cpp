#include <iostream>

#include "ambit/selftest.hpp"

#ifndef AMBIT_CONFIG_DIR
#define AMBIT_CONFIG_DIR ""
#endif

int main() {
  ambit::selftest::Options opts;
  opts.config_dir = AMBIT_CONFIG_DIR;
  const int failures = ambit::selftest::run_all(opts, std::cout);
  return failures == 0 ? 0 : 1;
}
