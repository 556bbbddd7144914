// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/mapping.hpp"

#include <cmath>

namespace aopt {

MappedCoefficients transform_coefficients(const BoundaryProfile& profile, const ReferenceDomain& dom) {
  require_mappable(profile, dom);
  MappedCoefficients mc;
  mc.dom = dom;
  const int N = dom.num_nodes();
  const int nz = dom.nz();
  const int j0 = dom.j_interface();
  const double ell0 = profile.ell0_ref;

  mc.inv_omega0.assign(N, 1.0);
  mc.vol_density.assign(N, 1.0);
  mc.m12.assign(N, 0.0);
  mc.m22.assign(N, 1.0);
  mc.c_cross.assign(N, 0.0);
  mc.c_zz.assign(N, 1.0);
  mc.c_z.assign(N, 0.0);

  mc.grad_ell = b_grid_d1(profile.ell, dom.dx());
  mc.lap_ell = b_grid_d2(profile.ell, dom.dx());

  for (int i = 0; i < dom.Nx; ++i) {
    const double ell = profile.ell[i];
    const double ge = mc.grad_ell[i];
    const double le = mc.lap_ell[i];
    for (int j = j0 + (dom.has_fix() ? 1 : 0); j < nz; ++j) {
      const int n = dom.idx(i, j);
      const double zh = dom.zhat(j);
      mc.inv_omega0[n] = ell / ell0;
      mc.vol_density[n] = ell / ell0;
      mc.m12[n] = -zh * ge / ell;
      mc.m22[n] = ell0 / ell;
      mc.c_cross[n] = -2.0 * zh * ge / ell;
      mc.c_zz[n] = (ell0 * ell0 + zh * zh * ge * ge) / (ell * ell);
      mc.c_z[n] = zh * (2.0 * ge * ge - ell * le) / (ell * ell);
    }
    if (dom.has_fix()) {
      // interface cell straddles the density jump
      const int n0 = dom.idx(i, j0);
      const double wlo = dom.dz_fix(), whi = dom.dz_var();
      mc.vol_density[n0] = (wlo * 1.0 + whi * ell / ell0) / (wlo + whi);
    }
  }

  mc.h_plus.assign(dom.Nx, 0.0);
  for (int i = 0; i < dom.Nx; ++i) mc.h_plus[i] = dom.dz_var() * profile.ell[i] / ell0;

  mc.omega1.assign(dom.Nx, 1.0);
  mc.tau_x.assign(dom.Nx, 0.0);
  mc.tau_z.assign(dom.Nx, 1.0);
  for (int i = 0; i < dom.Nx; ++i) {
    const double ge = mc.grad_ell[i];
    const double sigma = std::sqrt(1.0 + ge * ge);
    mc.omega1[i] = sigma;
    mc.tau_x[i] = -ge / sigma;
    mc.tau_z[i] = (ell0 / profile.ell[i]) * sigma;
  }
  return mc;
}

MappedCoefficientsDerivative coefficient_derivative(const BoundaryProfile& profile, const Vec& dell,
                                              const ReferenceDomain& dom) {
  require_mappable(profile, dom);
  if (static_cast<int>(dell.size()) != dom.Nx)
    fail(ErrorKind::ShapeMismatch, "perturbation not sampled on the B grid");
  const double scale = std::max(1.0, std::abs(profile.ell0_ref));
  if (std::abs(dell[0]) > 1e-12 * scale || std::abs(dell[dom.Nx - 1]) > 1e-12 * scale)
    fail(ErrorKind::TraceViolation, "profile perturbation must vanish at the ends of B");

  MappedCoefficientsDerivative d;
  const int N = dom.num_nodes();
  const int nz = dom.nz();
  const int j0 = dom.j_interface();
  const double ell0 = profile.ell0_ref;

  d.d_inv_omega0.assign(N, 0.0);
  d.d_vol_density.assign(N, 0.0);
  d.d_m12.assign(N, 0.0);
  d.d_m22.assign(N, 0.0);
  d.d_c_cross.assign(N, 0.0);
  d.d_c_zz.assign(N, 0.0);
  d.d_c_z.assign(N, 0.0);

  const Vec grad_ell = b_grid_d1(profile.ell, dom.dx());
  const Vec lap_ell = b_grid_d2(profile.ell, dom.dx());
  const Vec grad_d = b_grid_d1(dell, dom.dx());
  const Vec lap_d = b_grid_d2(dell, dom.dx());

  for (int i = 0; i < dom.Nx; ++i) {
    const double ell = profile.ell[i];
    const double de = dell[i];
    const double ge = grad_ell[i];
    const double le = lap_ell[i];
    const double gd = grad_d[i];
    const double ld = lap_d[i];
    if (dom.has_fix()) {
      const double wlo = dom.dz_fix(), whi = dom.dz_var();
      d.d_vol_density[dom.idx(i, j0)] = whi * de / (ell0 * (wlo + whi));
    }
    for (int j = j0 + (dom.has_fix() ? 1 : 0); j < nz; ++j) {
      const int n = dom.idx(i, j);
      const double zh = dom.zhat(j);
      d.d_inv_omega0[n] = de / ell0;
      d.d_vol_density[n] = de / ell0;
      d.d_m12[n] = -zh * (gd * ell - ge * de) / (ell * ell);
      d.d_m22[n] = -ell0 * de / (ell * ell);
      d.d_c_cross[n] = -2.0 * zh * (gd * ell - ge * de) / (ell * ell);
      d.d_c_zz[n] =
          2.0 * zh * zh * ge * gd / (ell * ell) - 2.0 * (ell0 * ell0 + zh * zh * ge * ge) * de / (ell * ell * ell);
      d.d_c_z[n] = zh * (4.0 * ge * gd - de * le - ell * ld) / (ell * ell) -
                   2.0 * zh * (2.0 * ge * ge - ell * le) * de / (ell * ell * ell);
    }
  }

  d.d_h_plus.assign(dom.Nx, 0.0);
  for (int i = 0; i < dom.Nx; ++i) d.d_h_plus[i] = dom.dz_var() * dell[i] / ell0;

  d.d_omega1.assign(dom.Nx, 0.0);
  d.d_tau_x.assign(dom.Nx, 0.0);
  d.d_tau_z.assign(dom.Nx, 0.0);
  for (int i = 0; i < dom.Nx; ++i) {
    const double ell = profile.ell[i];
    const double ge = grad_ell[i];
    const double gd = grad_d[i];
    const double de = dell[i];
    const double sigma = std::sqrt(1.0 + ge * ge);
    d.d_omega1[i] = ge * gd / sigma;
    d.d_tau_x[i] = -gd / (sigma * sigma * sigma);
    d.d_tau_z[i] = ell0 * ge * gd / (sigma * ell) - ell0 * sigma * de / (ell * ell);
  }
  return d;
}

BoundaryGeometry boundary_geometry(const BoundaryProfile& profile, const ReferenceDomain& dom) {
  require_mappable(profile, dom);
  BoundaryGeometry bg;
  const int n = dom.Nx;
  const Vec grad_ell = b_grid_d1(profile.ell, dom.dx());
  bg.sigma.assign(n, 1.0);
  bg.nu_x.assign(n, 0.0);
  bg.nu_z.assign(n, 1.0);
  Vec slope_over_sigma(n);
  for (int i = 0; i < n; ++i) {
    const double ge = grad_ell[i];
    const double sigma = std::sqrt(1.0 + ge * ge);
    bg.sigma[i] = sigma;
    bg.nu_x[i] = -ge / sigma;
    bg.nu_z[i] = 1.0 / sigma;
    slope_over_sigma[i] = ge / sigma;
  }
  const Vec div = b_grid_d1(slope_over_sigma, dom.dx());
  bg.curvature.assign(n, 0.0);
  for (int i = 0; i < n; ++i) bg.curvature[i] = -bg.sigma[i] * div[i];
  return bg;
}

InterfaceStencil interface_zz_stencil(double h_below, double h_above) {
  InterfaceStencil s;
  s.a_below = 2.0 / (h_below * (h_below + h_above));
  s.a_center = -2.0 / (h_below * h_above);
  s.a_above = 2.0 / (h_above * (h_below + h_above));
  return s;
}

InterfaceStencil interface_zz_stencil_derivative(double h_below, double h_above, double dh_above) {
  InterfaceStencil s;
  const double sum = h_below + h_above;
  s.a_below = -2.0 * dh_above / (h_below * sum * sum);
  s.a_center = 2.0 * dh_above / (h_below * h_above * h_above);
  s.a_above = -2.0 * (h_below + 2.0 * h_above) * dh_above / (h_above * h_above * sum * sum);
  return s;
}

}  // namespace aopt
