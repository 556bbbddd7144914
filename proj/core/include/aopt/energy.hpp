// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/forward.hpp"

namespace aopt {

/// One time sample of the model energy and its sub-terms. Acoustic parts are
/// evaluated for the extension field and the remainder field separately; the
/// plate part tracks the rate field. Mapped norms use the physical volume
/// density; history integrals accumulate with the trapezoid rule.
struct EnergyRecord {
  double t = 0.0;
  // extension field
  double pbar_tt_hist = 0.0;   // int_0^t ||p_tt||^2
  double pbar_t_h1 = 0.0;      // ||p_t(t)||_{H^1}^2
  double pbar_lap = 0.0;       // ||D2 p(t)||^2
  double pbar_lap_t_hist = 0.0;  // b int_0^t ||D2 p_t||^2
  double pbar_bnd_hist = 0.0;  // beta_a int_0^t ||p_tt||^2 on the side walls
  double pbar_bnd = 0.0;       // (gamma_a/2) ||p_t(t)||^2 on the side walls
  // remainder field (same sub-terms)
  double ptil_tt_hist = 0.0;
  double ptil_t_h1 = 0.0;
  double ptil_lap = 0.0;
  double ptil_lap_t_hist = 0.0;
  double ptil_bnd_hist = 0.0;
  double ptil_bnd = 0.0;
  // plate rate field
  double w_rate = 0.0;  // ||w_tt(t)||^2
  double w_lap = 0.0;   // ||Lap_pl w_t(t)||^2
  double total = 0.0;
};

std::vector<EnergyRecord> energy_series(const StateTrajectory& states, const PhysicalParams& params,
                                        const BoundaryProfile& profile, const ReferenceDomain& dom);

/// Squared data norm of the controls: the H^{s_g} history of g on the graph
/// boundary (surface density weighted), the H^1-in-time norm of g_t, and the
/// squared time-L1 norm of h_t.
double data_norm_sq(const SpaceTimeField& g, const SpaceTimeField& h, const BoundaryProfile& profile,
                    const ReferenceDomain& dom, const TimeGrid& tg, double s_g);

/// Discrete defect of the extension-field energy identity at the final time:
/// testing the equation with the damped Laplacian of the rate balances the
/// energy against the boundary work of the data.
struct EnergyIdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double defect = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|)
};
EnergyIdentityReport pbar_energy_identity(const StateTrajectory& states, const PhysicalParams& params,
                                          const SpaceTimeField& g, const BoundaryProfile& profile,
                                          const ReferenceDomain& dom);

}  // namespace aopt
