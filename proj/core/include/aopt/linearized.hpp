// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/forward.hpp"

namespace aopt {

/// Optional inhomogeneities of the linearized constraint, one slot per
/// equation block. Null means zero.
struct LinearizedRhs {
  const SpaceTimeField* f_pbar = nullptr;  // levels x N
  const SpaceTimeField* f_ptil = nullptr;  // levels x N
  const SpaceTimeField* f_w = nullptr;     // levels x plate nodes
  const SpaceTimeField* f_N = nullptr;     // levels x Nx, extra top-row data
  const SpaceTimeField* f_pl = nullptr;    // levels x plate nodes, transmission-row data
};

/// Linearization of the forward solve around a base trajectory, in the
/// directions (dg, dh, dell) and with the extra right-hand sides. This is
/// the exact derivative of the discrete forward map: the step matrices are
/// the converged Newton Jacobians of the base solve, so the frozen
/// coefficients are the base-state midpoint values. Homogeneous initial
/// data. dg/dh/dell may be empty (treated as zero).
StateTrajectory solve_linearized(const PhysicalParams& params, const StateTrajectory& base,
                                 const LinearizedRhs& rhs, const SpaceTimeField& dg,
                                 const SpaceTimeField& dh, const Vec& dell,
                                 const BoundaryProfile& profile, const ReferenceDomain& dom,
                                 const TimeGrid& tg);

}  // namespace aopt
