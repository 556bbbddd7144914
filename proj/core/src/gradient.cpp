// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "aopt/objective.hpp"
#include "aopt/operators.hpp"
#include "step_common.hpp"

namespace aopt {

namespace {
double time_weight(int n, int Nt, double dt) { return (n == 0 || n == Nt) ? 0.5 * dt : dt; }

/// A2^T A2 with the weighted-time transpose, acting level-wise on f - f0.
SpaceTimeField second_difference_normal(const SpaceTimeField& f, const SpaceTimeField& f0, int Nt,
                                        double dt) {
  const int nsp = f.n;
  const double dt2 = dt * dt;
  SpaceTimeField y(Nt + 1, nsp);  // rows 1..Nt-1 hold A2 f
  for (int n = 1; n < Nt; ++n)
    for (int i = 0; i < nsp; ++i)
      y.at(n, i) = (f.at(n - 1, i) - f0.at(n - 1, i) - 2.0 * (f.at(n, i) - f0.at(n, i)) +
                    f.at(n + 1, i) - f0.at(n + 1, i)) /
                   dt2;
  SpaceTimeField z(Nt + 1, nsp);
  for (int m = 0; m <= Nt; ++m) {
    const double wm = time_weight(m, Nt, dt);
    for (int i = 0; i < nsp; ++i) {
      double acc = 0.0;
      if (m - 1 >= 1 && m - 1 <= Nt - 1) acc += y.at(m - 1, i) / dt2;
      if (m >= 1 && m <= Nt - 1) acc += -2.0 * y.at(m, i) / dt2;
      if (m + 1 >= 1 && m + 1 <= Nt - 1) acc += y.at(m + 1, i) / dt2;
      z.at(m, i) = dt * acc / wm;
    }
  }
  return z;
}

/// A1^T A1 with the weighted-time transpose (forward differences).
SpaceTimeField first_difference_normal(const SpaceTimeField& f, const SpaceTimeField& f0, int Nt,
                                       double dt) {
  const int nsp = f.n;
  SpaceTimeField y(Nt + 1, nsp);  // rows 0..Nt-1 hold A1 f
  for (int n = 0; n < Nt; ++n)
    for (int i = 0; i < nsp; ++i)
      y.at(n, i) =
          (f.at(n + 1, i) - f0.at(n + 1, i) - (f.at(n, i) - f0.at(n, i))) / dt;
  SpaceTimeField z(Nt + 1, nsp);
  for (int m = 0; m <= Nt; ++m) {
    const double wm = time_weight(m, Nt, dt);
    for (int i = 0; i < nsp; ++i) {
      double acc = 0.0;
      if (m - 1 >= 0 && m - 1 <= Nt - 1) acc += y.at(m - 1, i) / dt;
      if (m <= Nt - 1) acc += -y.at(m, i) / dt;
      z.at(m, i) = dt * acc / wm;
    }
  }
  return z;
}
}  // namespace

SpaceTimeField gradient_g(const ControlVector& controls, const SpaceTimeField& mu_N,
                          const RegConfig& reg, const ReferenceDomain& dom, const TimeGrid& tg) {
  const int Nt = tg.Nt;
  check_shape(mu_N.levels == Nt + 1 && mu_N.n == dom.Nx, "gradient_g: multiplier shape");
  const MappedCoefficients coeffs = transform_coefficients(controls.ell, dom);

  SpaceTimeField out = second_difference_normal(controls.g, controls.g0, Nt, tg.dt());
  const NeumannSpectrum spec(dom.Nx, dom.Lx);
  const double dt = tg.dt();
  for (int n = 0; n <= Nt; ++n) {
    Vec row(dom.Nx);
    for (int i = 0; i < dom.Nx; ++i) row[i] = controls.g.at(n, i) - controls.g0.at(n, i);
    const Vec smooth = spec.apply(row, 2.0 * reg.s_g);
    // the data at level n drives exactly the step (n-1) -> n; its multiplier
    // lives at that step's midpoint, with a full dt slot
    const double wt = (n == 0 || n == Nt) ? 0.5 * dt : dt;
    for (int i = 0; i < dom.Nx; ++i) {
      double v = reg.theta * (out.at(n, i) + smooth[i]);
      if (i > 0 && i < dom.Nx - 1 && n >= 1) {
        const double mu_slot = 0.5 * (mu_N.at(n - 1, i) + mu_N.at(n, i));
        v -= (dt / wt) * coeffs.omega1[i] * mu_slot;
      }
      out.at(n, i) = v;
    }
  }
  for (int i = 0; i < dom.Nx; ++i) {
    out.at(0, i) = 0.0;
    out.at(1, i) = 0.0;
  }
  return out;
}

SpaceTimeField gradient_h(const ControlVector& controls, const SpaceTimeField& vtil,
                          const PhysicalParams& params, const RegConfig& reg,
                          const ReferenceDomain& dom, const TimeGrid& tg) {
  const int Nt = tg.Nt;
  check_shape(vtil.levels == Nt + 1 && vtil.n == dom.plate_nodes(), "gradient_h: adjoint shape");
  if (!(params.kappa > 0.0)) fail(ErrorKind::ConfigInvalid, "gradient_h requires kappa > 0");

  SpaceTimeField out = first_difference_normal(controls.h, controls.h0, Nt, tg.dt());
  const double scale = params.rho / params.kappa;
  for (int n = 0; n <= Nt; ++n)
    for (int i = 0; i < dom.plate_nodes(); ++i)
      out.at(n, i) = reg.theta * out.at(n, i) - scale * vtil.at(n, i);
  for (int i = 0; i < dom.plate_nodes(); ++i) out.at(0, i) = 0.0;
  return out;
}

Vec gradient_ell(const ControlVector& controls, const StateTrajectory& states,
                 const AdjointTrajectory& adj, const Targets& targets, const PhysicalParams& params,
                 const RegConfig& reg, const ReferenceDomain& dom, const TimeGrid& tg) {
  const int N = dom.num_nodes();
  const int Nt = tg.Nt;
  const double dt = tg.dt();
  const double c2 = params.c * params.c;
  const double k = params.k;
  check_shape(states.pbar.n == N && adj.qbar.n == N, "gradient_ell: shapes");

  const MappedCoefficients coeffs = transform_coefficients(controls.ell, dom);
  const SparseOperator d2 = assemble_mapped_d2(coeffs);
  const double inv_ell0 = 1.0 / controls.ell.ell0_ref;

  // regularizer density
  Vec out(dom.Nx, 0.0);
  {
    const NeumannSpectrum spec(dom.Nx, dom.Lx);
    Vec diff(dom.Nx);
    for (int i = 0; i < dom.Nx; ++i) diff[i] = controls.ell.ell[i] - controls.ell0.ell[i];
    const Vec smooth = spec.apply(diff, reg.s_ell);
    for (int i = 0; i < dom.Nx; ++i) out[i] = reg.theta * smooth[i];
  }

  // per-direction coefficient derivatives
  struct DirData {
    SparseOperator dD2;
    Vec d_omega1, d_tau_x, d_tau_z;
  };
  std::vector<DirData> dirs(dom.Nx);
  std::vector<bool> active(dom.Nx, false);
  for (int m = 2; m < dom.Nx - 2; ++m) {
    Vec e(dom.Nx, 0.0);
    e[m] = 1.0;
    const MappedCoefficientsDerivative dc = coefficient_derivative(controls.ell, e, dom);
    dirs[m].dD2 = assemble_mapped_d2_derivative(coeffs, dc);
    dirs[m].d_omega1 = dc.d_omega1;
    dirs[m].d_tau_x = dc.d_tau_x;
    dirs[m].d_tau_z = dc.d_tau_z;
    active[m] = true;
  }

  // top-trace multiplier of the remainder field's boundary row; its row is
  // part of the discrete solution map even though the continuous setting
  // hides it in the state space
  SpaceTimeField mu_til_N(Nt + 1, dom.Nx);
  {
    SpaceTimeField trace(Nt + 1, dom.Nx);
    const int J = dom.nz() - 1;
    for (int t = 0; t <= Nt; ++t)
      for (int i = 0; i < dom.Nx; ++i) trace.at(t, i) = adj.qtil.at(t, dom.idx(i, J));
    const SpaceTimeField dtrace = fd_time_derivative(trace, dt);
    for (int t = 0; t <= Nt; ++t)
      for (int i = 0; i < dom.Nx; ++i)
        mu_til_N.at(t, i) = c2 * trace.at(t, i) - params.b * dtrace.at(t, i);
  }

  Vec pairing(dom.Nx, 0.0);
  const int j0 = dom.j_interface();

  for (int n = 0; n < Nt; ++n) {
    const Vec pbar_mid = detail::midpoint_of(states.pbar.level(n), states.pbar.level(n + 1));
    const Vec vbar_mid = detail::midpoint_of(states.pbar_vel.level(n), states.pbar_vel.level(n + 1));
    const Vec pbar_tt = detail::quotient_of(states.pbar_vel.level(n), states.pbar_vel.level(n + 1), dt);
    const Vec ptil_mid = detail::midpoint_of(states.ptil.level(n), states.ptil.level(n + 1));
    const Vec vtil_mid = detail::midpoint_of(states.ptil_vel.level(n), states.ptil_vel.level(n + 1));
    const Vec ptil_tt = detail::quotient_of(states.ptil_vel.level(n), states.ptil_vel.level(n + 1), dt);
    const Vec qbar_mid = detail::midpoint_of(adj.qbar.level(n), adj.qbar.level(n + 1));
    const Vec qtil_mid = detail::midpoint_of(adj.qtil.level(n), adj.qtil.level(n + 1));

    const Vec d2_pbar = d2.apply(pbar_mid);
    const Vec d2_vbar = d2.apply(vbar_mid);
    const Vec d2_ptil = d2.apply(ptil_mid);
    const Vec d2_vtil = d2.apply(vtil_mid);

    // interval residuals in the pairing arrangement (vanish for solver states)
    Vec rbar(N, 0.0), rtil(N, 0.0);
    for (int i = 1; i < dom.Nx - 1; ++i) {
      for (int j = 1; j < dom.nz() - 1; ++j) {
        const int m = dom.idx(i, j);
        rbar[m] = pbar_tt[m] - c2 * d2_pbar[m] - params.b * d2_vbar[m];
        const double vt = vbar_mid[m] + vtil_mid[m];
        rtil[m] = ptil_tt[m] - c2 * d2_ptil[m] - params.b * d2_vtil[m] - 2.0 * k * vt * vt -
                  2.0 * k * (pbar_mid[m] + ptil_mid[m]) * (pbar_tt[m] + ptil_tt[m]);
      }
    }

    for (int m = 2; m < dom.Nx - 2; ++m) {
      if (!active[m]) continue;
      double val = 0.0;
      // volume-density derivative and tracking term along column m
      for (int j = j0; j < dom.nz(); ++j) {
        const int node = dom.idx(m, j);
        double dvol = inv_ell0;
        if (dom.has_fix() && j == j0)
          dvol = dom.dz_var() * inv_ell0 / (dom.dz_fix() + dom.dz_var());
        const double w = dom.wx(m) * dom.wz(j) * dvol;
        if (j >= 1 && j < dom.nz() - 1)
          val += w * (rbar[node] * qbar_mid[node] + rtil[node] * qtil_mid[node]);
        if (targets.roi_mask[node] != 0.0) {
          const double mis = pbar_mid[node] + ptil_mid[node] -
                             0.5 * (targets.p_d.at(n, node) + targets.p_d.at(n + 1, node));
          val += w * 0.5 * mis * mis;
        }
      }
      // operator derivative paired with the adjoints
      for (const auto& e : dirs[m].dD2.entries()) {
        const double wq = dom.wx(e.row / dom.nz()) * dom.wz(e.row % dom.nz()) *
                          coeffs.vol_density[e.row];
        val += wq * e.value *
               (qbar_mid[e.row] * (-c2 * pbar_mid[e.col] - params.b * vbar_mid[e.col]) +
                qtil_mid[e.row] * (-c2 * ptil_mid[e.col] - params.b * vtil_mid[e.col]));
      }
      // top-boundary terms: data row of the extension field and the hidden
      // homogeneous row of the remainder field
      for (int i = 1; i < dom.Nx - 1; ++i) {
        const double dw1 = dirs[m].d_omega1[i];
        const bool has_dtau = dirs[m].d_tau_x[i] != 0.0 || dirs[m].d_tau_z[i] != 0.0;
        if (dw1 == 0.0 && !has_dtau) continue;
        const double mu_mid = 0.5 * (adj.mu_N.at(n, i) + adj.mu_N.at(n + 1, i));
        const double mu_til_mid = 0.5 * (mu_til_N.at(n, i) + mu_til_N.at(n + 1, i));
        double term = 0.0;
        if (dw1 != 0.0) {
          const detail::Row r = detail::top_conormal_row(dom, coeffs.tau_x, coeffs.tau_z, i);
          const double gm = 0.5 * (controls.g.at(n, i) + controls.g.at(n + 1, i));
          term += dw1 * (r.dot(pbar_mid) - gm) * mu_mid;
          term += dw1 * r.dot(ptil_mid) * mu_til_mid;
        }
        if (has_dtau) {
          const detail::Row dr = detail::top_conormal_row(dom, dirs[m].d_tau_x, dirs[m].d_tau_z, i);
          term += coeffs.omega1[i] * dr.dot(pbar_mid) * mu_mid;
          term += coeffs.omega1[i] * dr.dot(ptil_mid) * mu_til_mid;
        }
        val += dom.wx(i) * term;
      }
      pairing[m] += dt * val;
    }
  }

  for (int m = 0; m < dom.Nx; ++m) {
    if (!active[m]) {
      out[m] = 0.0;
      continue;
    }
    out[m] += pairing[m] / dom.wx(m);
  }
  out[0] = out[1] = out[dom.Nx - 2] = out[dom.Nx - 1] = 0.0;
  return out;
}

Vec shape_gradient_boundary_form(const ControlVector& controls, const StateTrajectory& states,
                                 const AdjointTrajectory& adj, const PhysicalParams& params,
                                 const RegConfig& reg, const ReferenceDomain& dom, const TimeGrid& tg) {
  const int N = dom.num_nodes();
  const int Nt = tg.Nt;
  const double dt = tg.dt();
  const double c2 = params.c * params.c;
  const double k = params.k;
  check_shape(states.pbar_t.n == N, "shape_gradient_boundary_form: call compute_time_derivatives");

  const MappedCoefficients coeffs = transform_coefficients(controls.ell, dom);
  const BoundaryGeometry bg = boundary_geometry(controls.ell, dom);
  const SparseOperator d2 = assemble_mapped_d2(coeffs);
  const int J = dom.nz() - 1;
  const double dzv = dom.dz_var();
  const double dx = dom.dx();

  Vec out(dom.Nx, 0.0);
  {
    const NeumannSpectrum spec(dom.Nx, dom.Lx);
    Vec diff(dom.Nx);
    for (int i = 0; i < dom.Nx; ++i) diff[i] = controls.ell.ell[i] - controls.ell0.ell[i];
    const Vec smooth = spec.apply(diff, reg.s_ell);
    for (int i = 0; i < dom.Nx; ++i) out[i] = reg.theta * smooth[i];
  }

  // time-integrated residual trace one row below the top
  Vec tres(dom.Nx, 0.0);
  // flux defect phi on the top three rows, time-integrated
  std::vector<Vec> phi(3, Vec(dom.Nx, 0.0));

  for (int n = 0; n <= Nt; ++n) {
    const double wt = time_weight(n, Nt, dt);
    const Vec pbar_n(states.pbar.level(n).begin(), states.pbar.level(n).end());
    const Vec vbar_n(states.pbar_vel.level(n).begin(), states.pbar_vel.level(n).end());
    const Vec ptil_n(states.ptil.level(n).begin(), states.ptil.level(n).end());
    const Vec vtil_n(states.ptil_vel.level(n).begin(), states.ptil_vel.level(n).end());
    const Vec d2_pbar = d2.apply(pbar_n);
    const Vec d2_vbar = d2.apply(vbar_n);
    const Vec d2_ptil = d2.apply(ptil_n);
    const Vec d2_vtil = d2.apply(vtil_n);

    for (int i = 1; i < dom.Nx - 1; ++i) {
      const int m = dom.idx(i, J - 1);
      const double rbar = states.pbar_tt.at(n, m) - c2 * d2_pbar[m] - params.b * d2_vbar[m];
      const double total = pbar_n[m] + ptil_n[m];
      const double vt = states.pbar_t.at(n, m) + states.ptil_t.at(n, m);
      const double rtil = (1.0 - 2.0 * k * total) * states.ptil_tt.at(n, m) - c2 * d2_ptil[m] -
                          params.b * d2_vtil[m] - 2.0 * k * vt * vt -
                          2.0 * k * total * states.pbar_tt.at(n, m);
      tres[i] += wt * (rbar * adj.qbar.at(n, m) + rtil * adj.qtil.at(n, m));
    }
    for (int r = 0; r < 3; ++r) {
      const int j = J - r;
      for (int i = 1; i < dom.Nx - 1; ++i) {
        double fx = (pbar_n[dom.idx(i + 1, j)] - pbar_n[dom.idx(i - 1, j)]) / (2.0 * dx);
        double fz;
        if (j == J)
          fz = (3.0 * pbar_n[dom.idx(i, J)] - 4.0 * pbar_n[dom.idx(i, J - 1)] +
                pbar_n[dom.idx(i, J - 2)]) /
               (2.0 * dzv);
        else
          fz = (pbar_n[dom.idx(i, j + 1)] - pbar_n[dom.idx(i, j - 1)]) / (2.0 * dzv);
        const double flux = coeffs.tau_x[i] * fx + coeffs.tau_z[i] * fz;
        phi[r][i] += wt * (flux - controls.g.at(n, i)) * adj.mu_N.at(n, i);
      }
    }
  }

  for (int i = 1; i < dom.Nx - 1; ++i) {
    // conormal derivative of phi at the top, one-sided in z, centered in x
    const double phix = (phi[0][i + 1] - phi[0][i - 1]) / (2.0 * dx);
    const double phiz = (3.0 * phi[0][i] - 4.0 * phi[1][i] + phi[2][i]) / (2.0 * dzv);
    const double dnu_phi = coeffs.tau_x[i] * phix + coeffs.tau_z[i] * phiz;
    out[i] += tres[i] + dnu_phi + phi[0][i] * bg.curvature[i];
  }
  out[0] = out[dom.Nx - 1] = 0.0;
  return out;
}

}  // namespace aopt
