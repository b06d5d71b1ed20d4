// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "prunemi/cli.hpp"

int main(int argc, char** argv) { return prunemi::cli_main(argc, argv, std::cout, std::cerr); }
