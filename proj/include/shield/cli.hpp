// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace shield::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInternal = 3;

/// Entry point for the `shield` tool: subcommands dist, epsilon, simulate,
/// circuit, pareto. Reports go to `out`, diagnostics to `err`. Identical
/// inputs (flags, files, seeds) produce byte-identical output.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace shield::cli
