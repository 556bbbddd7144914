// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/profile.hpp"

namespace aopt {

/// Nodal coefficient fields of the graph transform that pulls the physical
/// domain back to the reference box. On the fixed block everything reduces
/// to the identity; on the variable block the fields depend on the column
/// profile and its first two derivatives on B.
///
/// The pulled-back Laplacian is
///   D2 f = f_xx + c_cross f_xz + c_zz f_zz + c_z f_z
/// and the physical gradient is M grad_ref with M = [[1, m12], [0, m22]].
struct MappedCoefficients {
  ReferenceDomain dom;
  Vec inv_omega0;  // physical volume density (= ell/ell0 on the variable block)
  Vec vol_density;  // quadrature density; splits the jump cell at z = 0
  Vec m12, m22;
  Vec c_cross, c_zz, c_z;  // second-order expansion coefficients; c_xx == 1
  Vec h_plus;              // physical spacing above the z = 0 interface, per column
  // Top-boundary data, per B node:
  Vec omega1;        // surface density of the graph boundary
  Vec tau_x, tau_z;  // conormal coefficients: tau . grad_ref == physical normal derivative
  Vec grad_ell, lap_ell;

  double omega0(int node) const { return 1.0 / inv_omega0[node]; }
};

/// Directional derivatives of every coefficient field with respect to the
/// profile, in a fixed direction dell (endpoint-clamped).
struct MappedCoefficientsDerivative {
  Vec d_inv_omega0;
  Vec d_vol_density;
  Vec d_m12, d_m22;
  Vec d_c_cross, d_c_zz, d_c_z;
  Vec d_h_plus;
  Vec d_omega1;
  Vec d_tau_x, d_tau_z;
};

/// Unit outward normal, surface element and mean curvature of the graph
/// boundary, per B node.
struct BoundaryGeometry {
  Vec sigma;
  Vec nu_x, nu_z;
  Vec curvature;
};

MappedCoefficients transform_coefficients(const BoundaryProfile& profile, const ReferenceDomain& dom);

MappedCoefficientsDerivative coefficient_derivative(const BoundaryProfile& profile, const Vec& dell,
                                              const ReferenceDomain& dom);

BoundaryGeometry boundary_geometry(const BoundaryProfile& profile, const ReferenceDomain& dom);

/// Interior row of D2 at the z = 0 interface: plain x-part plus a 3-point
/// second difference over the physical spacings below/above.
struct InterfaceStencil {
  double a_below, a_center, a_above;
};
InterfaceStencil interface_zz_stencil(double h_below, double h_above);
InterfaceStencil interface_zz_stencil_derivative(double h_below, double h_above, double dh_above);

}  // namespace aopt
