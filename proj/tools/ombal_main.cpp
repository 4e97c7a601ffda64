// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/cli/commands.hpp"

int main(int argc, char** argv) { return ombal::cli::main(argc, argv); }
