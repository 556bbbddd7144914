// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/adjoint.hpp"
#include "aopt/fractional.hpp"
#include "aopt/linearized.hpp"

namespace aopt {

/// Design triple plus its priors. g uses the pull-back convention on the
/// reference top boundary; h lives on the plate; the profile on B.
struct ControlVector {
  SpaceTimeField g, h;
  BoundaryProfile ell;
  SpaceTimeField g0, h0;
  BoundaryProfile ell0;

  static ControlVector zeros(const ReferenceDomain& dom, int Nt);
};

struct RegConfig {
  double theta = 0.0;
  double s_g = 0.5;   // spatial smoothing exponent for g
  double s_ell = 3.0; // profile smoothing exponent
};

struct ObjectiveBreakdown {
  double tracking_p = 0.0;
  double tracking_w = 0.0;
  double reg_g_time = 0.0;
  double reg_g_space = 0.0;
  double reg_h = 0.0;
  double reg_ell = 0.0;
  double theta = 0.0;
  double total = 0.0;
};

/// Tracking-plus-regularization objective. Trapezoidal quadrature in time and
/// space; the pressure misfit integrates against the physical volume density.
ObjectiveBreakdown eval_objective(const ControlVector& controls, const StateTrajectory& states,
                                  const Targets& targets, const RegConfig& reg,
                                  const ReferenceDomain& dom, const TimeGrid& tg);

/// Nodal mask for a closed rectangle in reference coordinates.
Vec roi_mask_rectangle(const ReferenceDomain& dom, double x0, double x1, double z0, double z1);

/// Objective gradient with respect to g, as a density in the weighted
/// space-time pairing; the first two time layers are projected out.
SpaceTimeField gradient_g(const ControlVector& controls, const SpaceTimeField& mu_N,
                          const RegConfig& reg, const ReferenceDomain& dom, const TimeGrid& tg);

/// Gradient with respect to h; the first time layer is projected out.
SpaceTimeField gradient_h(const ControlVector& controls, const SpaceTimeField& vtil,
                          const PhysicalParams& params, const RegConfig& reg,
                          const ReferenceDomain& dom, const TimeGrid& tg);

/// Gradient with respect to the profile: regularizer part plus the profile
/// derivative of the constraint pairing against the adjoint tuple, assembled
/// per B-node basis direction. Endpoint-clamped entries are zero.
Vec gradient_ell(const ControlVector& controls, const StateTrajectory& states,
                 const AdjointTrajectory& adj, const Targets& targets, const PhysicalParams& params,
                 const RegConfig& reg, const ReferenceDomain& dom, const TimeGrid& tg);

/// Literal boundary-integral form of the shape derivative (residual traces,
/// conormal derivative of the flux defect, curvature term). Diagnostic only.
Vec shape_gradient_boundary_form(const ControlVector& controls, const StateTrajectory& states,
                                 const AdjointTrajectory& adj, const PhysicalParams& params,
                                 const RegConfig& reg, const ReferenceDomain& dom, const TimeGrid& tg);

/// Discrete Agmon-style bound for the g regularizer: returns (lhs, rhs) with
/// lhs = sup over midpoint levels of the H^{s_g} norm of (g - g0)_t and rhs
/// the integrated right-hand side. lhs <= rhs holds exactly on the grid.
std::pair<double, double> agmon_check(const ControlVector& controls, const RegConfig& reg,
                                      const ReferenceDomain& dom, const TimeGrid& tg);

/// Weighted inner products of control-space tangents (trapezoid in time and
/// space); the profile block uses the B-grid weights.
double control_inner_g(const SpaceTimeField& a, const SpaceTimeField& b, const ReferenceDomain& dom,
                       const TimeGrid& tg);
double control_inner_h(const SpaceTimeField& a, const SpaceTimeField& b, const ReferenceDomain& dom,
                       const TimeGrid& tg);
double control_inner_ell(const Vec& a, const Vec& b, const ReferenceDomain& dom);

}  // namespace aopt
