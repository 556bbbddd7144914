// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/forward.hpp"

namespace aopt {

/// Backward-in-time solve of the adjoint system around a forward state, with
/// the same trapezoidal scheme time-reversed and the two wave adjoints and
/// the plate adjoint coupled monolithically per step. Requires the absorbing
/// coefficients (beta_a, gamma_a) = (1/c, 0). Terminal data is zero.
AdjointTrajectory solve_adjoint(const PhysicalParams& params, const StateTrajectory& states,
                                const Targets& targets, const BoundaryProfile& profile,
                                const ReferenceDomain& dom);

/// Boundary multipliers from the adjoint traces: mu = c^2 tr q - b d/dt tr q,
/// the time derivative taken by centered differences (one-sided at the ends).
/// Fills adj.mu_N and adj.mu_pl and returns references to them.
void extract_multipliers(AdjointTrajectory& adj, const PhysicalParams& params,
                         const BoundaryProfile& profile);

}  // namespace aopt
