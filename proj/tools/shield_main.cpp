// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "shield/cli.hpp"

int main(int argc, char** argv) {
  return shield::cli::run(argc, argv, std::cout, std::cerr);
}
