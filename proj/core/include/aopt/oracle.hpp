// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/optimizer.hpp"

namespace aopt {

/// Central-difference directional derivatives of the reduced objective.
/// Purely forward-solve based; never touches the adjoint path, so it is an
/// independent check of adjoint gradients.
struct FdOracleReport {
  Vec taus;
  Vec values;             // central difference per tau
  double plateau_value = 0.0;
  double plateau_tau = 0.0;
  bool plateau_ok = false;
};

FdOracleReport fd_gradient_oracle(const Problem& problem, const ControlVector& controls,
                                  const ControlTangent& direction, const Vec& taus, int jobs = 1);

/// Remainder of the first-order expansion of the solution map against the
/// linearized solve, over a step-size sweep; slope from a log-log fit.
struct TaylorReport {
  Vec taus;
  Vec remainders;
  double slope = 0.0;
  double slope_over(double tau_lo, double tau_hi) const;
};

TaylorReport taylor_test(const Problem& problem, const ControlVector& controls,
                         const ControlTangent& direction, const Vec& taus, int jobs = 1);

/// Weighted space-time distance between two trajectories over all evolved
/// fields; the norm used by the remainder sweep.
double trajectory_distance(const StateTrajectory& a, const StateTrajectory& b,
                           const ReferenceDomain& dom);

}  // namespace aopt
