// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/config.hpp"
#include "aopt/oracle.hpp"

namespace aopt {

struct RunOptions {
  int jobs = 1;
  std::string out_override;  // --out or AOPT_OUT
  bool resume = false;
};

/// Execute one CLI command against a config file. Returns the process exit
/// code: 0 success, 2 validation error, 3 solver error, 4 check failure.
int run_command(const std::string& command, const std::string& config_path, const RunOptions& opts);

/// Deterministic smooth tangent directions for the derivative checks; the
/// same seed reproduces the same continuum direction on any grid.
ControlTangent make_check_direction(const ReferenceDomain& dom, const TimeGrid& tg,
                                    const std::string& component, unsigned seed);

}  // namespace aopt
