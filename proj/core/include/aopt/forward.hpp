// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/operators.hpp"
#include "aopt/trajectory.hpp"

namespace aopt {

struct PhysicalParams {
  double c = 1.0;      // sound speed
  double b = 0.1;      // strong damping
  double k = 0.0;      // quadratic nonlinearity
  double rho = 1.0;    // plate density
  double delta = 1.0;  // plate stiffness
  double kappa = 1.0;  // acoustic-plate coupling
  double beta_a = 1.0;
  double gamma_a = 0.0;
  double beta_pl = 0.0;  // optional plate damping, disabled by default
  double gamma_pl = 1.0;

  void validate() const;
};

/// Initial data for the remainder pressure and the plate rate. The extension
/// field always starts from rest.
struct InitialData {
  Vec p0, p1;  // acoustic grid
  Vec w0, w1;  // plate grid

  static InitialData zero(const ReferenceDomain& dom);
};

/// Residual norms of the corner compatibility conditions; all vanish for
/// zero data. Reported, never enforced.
struct CompatibilityReport {
  double gamma_a_order0 = 0.0;  // d_nu p0 + a[p0, p1] on the side walls
  double gamma_a_order1 = 0.0;  // d_nu p2 + a[p1, p2]
  double gamma_pl_order0 = 0.0;  // d_nu p0 + rho w1 on the plate
  double gamma_pl_order1 = 0.0;  // d_nu p1 + rho w2
  double max_abs() const;
};

CompatibilityReport compatibility_residuals(const InitialData& init, const PhysicalParams& params,
                                            const MappedCoefficients& coeffs, const Vec& h_at_0);

/// Time-stepping controls shared by the solvers. The trapezoidal step is
/// enforced in midpoint-residual form, which the duality pairing exploits.
struct TimeGrid {
  double T = 1.0;
  int Nt = 64;
  double dt() const { return T / Nt; }
};

/// Linear strongly damped wave for the Neumann-data extension field.
/// g is a (Nt+1) x Nx array in the pull-back convention.
void solve_pbar(const PhysicalParams& params, const SpaceTimeField& g, const BoundaryProfile& profile,
                const ReferenceDomain& dom, const TimeGrid& tg, StateTrajectory& out);

/// Monolithic quasilinear step for the remainder pressure coupled to the
/// plate. Requires out.pbar/pbar_vel from solve_pbar on the same grids.
/// Newton with analytic Jacobian; relative residual tolerance 1e-10.
void solve_ptil_plate(const PhysicalParams& params, const SpaceTimeField& h,
                      const BoundaryProfile& profile, const ReferenceDomain& dom,
                      const InitialData& init, const TimeGrid& tg, StateTrajectory& inout);

/// Convenience wrapper running both stages.
StateTrajectory solve_forward(const PhysicalParams& params, const SpaceTimeField& g,
                              const SpaceTimeField& h, const BoundaryProfile& profile,
                              const ReferenceDomain& dom, const InitialData& init, const TimeGrid& tg);

}  // namespace aopt
