// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/forward.hpp"

namespace aopt {

/// Discrete test tuple of the constraint pairing: two acoustic fields, a
/// plate field, and the two boundary multipliers.
struct TestTuple {
  SpaceTimeField qbar, qtil;  // levels x N
  SpaceTimeField vtil;        // levels x plate nodes
  SpaceTimeField mu_N;        // levels x Nx
  SpaceTimeField mu_pl;       // levels x plate nodes
};

/// Duality pairing of the full constraint residual with a test tuple, on the
/// reference domain with the pull-back volume and surface densities.
/// Quadrature: midpoint rule in time (trapezoidal data averages), nodal
/// trapezoid weights in space. Solver-generated trajectories annihilate the
/// pairing to solver tolerance.
double residual_APDE(const PhysicalParams& params, const SpaceTimeField& g, const SpaceTimeField& h,
                     const BoundaryProfile& profile, const ReferenceDomain& dom,
                     const StateTrajectory& states, const TestTuple& tests);

}  // namespace aopt
