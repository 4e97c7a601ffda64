// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Command-line front end: calibrate, train, replay, ablate, align-demo.
// Exit codes: 0 success, 1 configuration or input error, 2 numerical or
// training failure.

#include <ostream>
#include <string>
#include <vector>

namespace ombal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace ombal::cli
