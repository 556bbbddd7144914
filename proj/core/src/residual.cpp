// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/residual.hpp"

#include "step_common.hpp"

namespace aopt {

double residual_APDE(const PhysicalParams& params, const SpaceTimeField& g, const SpaceTimeField& h,
                     const BoundaryProfile& profile, const ReferenceDomain& dom,
                     const StateTrajectory& states, const TestTuple& tests) {
  const int N = dom.num_nodes();
  const int Npl = dom.plate_nodes();
  const int Nt = states.Nt;
  check_shape(states.pbar.n == N && states.ptil.n == N, "residual_APDE: state shape");
  check_shape(tests.qbar.n == N && tests.qtil.n == N && tests.vtil.n == Npl, "residual_APDE: test shape");
  check_shape(tests.mu_N.n == dom.Nx && tests.mu_pl.n == Npl, "residual_APDE: multiplier shape");
  check_shape(g.levels == Nt + 1 && h.levels == Nt + 1, "residual_APDE: control shape");

  const MappedCoefficients coeffs = transform_coefficients(profile, dom);
  const SparseOperator d2 = assemble_mapped_d2(coeffs);
  const double dt = states.dt;
  const double c2 = params.c * params.c;
  const double k = params.k;
  const double dxpl = dom.dx();

  auto mid = [](std::span<const double> lo, std::span<const double> hi, int m) {
    return 0.5 * (lo[m] + hi[m]);
  };

  double total = 0.0;
  for (int n = 0; n < Nt; ++n) {
    Vec pbar_mid = detail::midpoint_of(states.pbar.level(n), states.pbar.level(n + 1));
    Vec vbar_mid = detail::midpoint_of(states.pbar_vel.level(n), states.pbar_vel.level(n + 1));
    Vec pbar_tt = detail::quotient_of(states.pbar_vel.level(n), states.pbar_vel.level(n + 1), dt);
    Vec ptil_mid = detail::midpoint_of(states.ptil.level(n), states.ptil.level(n + 1));
    Vec vtil_mid = detail::midpoint_of(states.ptil_vel.level(n), states.ptil_vel.level(n + 1));
    Vec ptil_tt = detail::quotient_of(states.ptil_vel.level(n), states.ptil_vel.level(n + 1), dt);

    const Vec d2_pbar = d2.apply(pbar_mid);
    const Vec d2_vbar = d2.apply(vbar_mid);
    const Vec d2_ptil = d2.apply(ptil_mid);
    const Vec d2_vtil = d2.apply(vtil_mid);

    double acc = 0.0;
    // interior pairing with the physical volume density
    for (int i = 1; i < dom.Nx - 1; ++i) {
      for (int j = 1; j < dom.nz() - 1; ++j) {
        const int m = dom.idx(i, j);
        const double w = dom.wx(i) * dom.wz(j) * coeffs.vol_density[m];
        const double rbar = pbar_tt[m] - c2 * d2_pbar[m] - params.b * d2_vbar[m];
        const double vt = vbar_mid[m] + vtil_mid[m];
        const double rtil = ptil_tt[m] - c2 * d2_ptil[m] - params.b * d2_vtil[m] -
                            2.0 * k * vt * vt -
                            2.0 * k * (pbar_mid[m] + ptil_mid[m]) * (pbar_tt[m] + ptil_tt[m]);
        acc += w * (rbar * mid(tests.qbar.level(n), tests.qbar.level(n + 1), m) +
                    rtil * mid(tests.qtil.level(n), tests.qtil.level(n + 1), m));
      }
    }
    // plate pairing
    for (int i = 1; i < Npl - 1; ++i) {
      const double w = dom.wx(i);
      const int m = dom.idx(i, 0);
      const double om_t = (states.wtil_vel.at(n + 1, i) - states.wtil_vel.at(n, i)) / dt;
      const double hm = mid(h.level(n), h.level(n + 1), i);
      const double vt_tr = vbar_mid[m] + vtil_mid[m];
      const double vtest = mid(tests.vtil.level(n), tests.vtil.level(n + 1), i);
      double lap_w = 0.0, lap_vtest = 0.0;
      {
        const double wm = mid(states.wtil.level(n), states.wtil.level(n + 1), i - 1);
        const double w0 = mid(states.wtil.level(n), states.wtil.level(n + 1), i);
        const double wp = mid(states.wtil.level(n), states.wtil.level(n + 1), i + 1);
        lap_w = (wm - 2.0 * w0 + wp) / (dxpl * dxpl);
        const double vm = mid(tests.vtil.level(n), tests.vtil.level(n + 1), i - 1);
        const double v0 = vtest;
        const double vp = mid(tests.vtil.level(n), tests.vtil.level(n + 1), i + 1);
        lap_vtest = (vm - 2.0 * v0 + vp) / (dxpl * dxpl);
      }
      acc += w * (params.rho / params.kappa) *
             ((params.rho * om_t - hm - params.kappa * vt_tr) * vtest +
              params.delta * lap_w * lap_vtest);
      // transmission multiplier row
      const detail::Row r = detail::bottom_outward_row(dom, i);
      const double dnu_ptil = r.dot(ptil_mid);
      const double om_mid = mid(states.wtil_vel.level(n), states.wtil_vel.level(n + 1), i);
      acc += w * (dnu_ptil + params.rho * om_mid) * mid(tests.mu_pl.level(n), tests.mu_pl.level(n + 1), i);
    }
    // Neumann multiplier row with the surface density
    for (int i = 1; i < dom.Nx - 1; ++i) {
      const detail::Row r = detail::top_conormal_row(dom, coeffs.tau_x, coeffs.tau_z, i);
      const double flux = r.dot(pbar_mid);
      const double gm = mid(g.level(n), g.level(n + 1), i);
      acc += dom.wx(i) * coeffs.omega1[i] * (flux - gm) *
             mid(tests.mu_N.level(n), tests.mu_N.level(n + 1), i);
    }
    total += dt * acc;
  }
  return total;
}

}  // namespace aopt
