// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "kgadapt/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kgadapt::cli::run_cli(args, std::cout, std::cerr);
}
