// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/linearized.hpp"

#include <cmath>

#include "step_common.hpp"

namespace aopt {

using detail::LuSolver;
using detail::PbarStep;
using detail::PtilStep;
using detail::PtilStepInputs;

StateTrajectory solve_linearized(const PhysicalParams& params, const StateTrajectory& base,
                                 const LinearizedRhs& rhs, const SpaceTimeField& dg,
                                 const SpaceTimeField& dh, const Vec& dell,
                                 const BoundaryProfile& profile, const ReferenceDomain& dom,
                                 const TimeGrid& tg) {
  params.validate();
  const int N = dom.num_nodes();
  const int Npl = dom.plate_nodes();
  const int Nt = tg.Nt;
  const double dt = tg.dt();
  check_shape(base.Nt == Nt && base.pbar.n == N && base.ptil.n == N, "solve_linearized: base shape");
  if (base.nondegeneracy_margin <= 0.1)
    fail(ErrorKind::NonDegeneracyViolated, "base trajectory is degenerate");

  const MappedCoefficients coeffs = transform_coefficients(profile, dom);
  const bool with_shape = !dell.empty();
  SparseOperator dD2;
  MappedCoefficientsDerivative dcoeffs;
  if (with_shape) {
    dcoeffs = coefficient_derivative(profile, dell, dom);
    dD2 = assemble_mapped_d2_derivative(coeffs, dcoeffs);
  }

  StateTrajectory out;
  out.dom = dom;
  out.dt = dt;
  out.T = tg.T;
  out.Nt = Nt;
  out.pbar = SpaceTimeField(Nt + 1, N);
  out.pbar_vel = SpaceTimeField(Nt + 1, N);
  out.ptil = SpaceTimeField(Nt + 1, N);
  out.ptil_vel = SpaceTimeField(Nt + 1, N);
  out.wtil = SpaceTimeField(Nt + 1, Npl);
  out.wtil_vel = SpaceTimeField(Nt + 1, Npl);

  // Stage 1: the extension-field linearization.
  PbarStep pstep(params, coeffs, tg);
  const double c2 = params.c * params.c;
  Vec interior_mid(N, 0.0), neumann_plus(dom.Nx, 0.0);
  for (int n = 0; n < Nt; ++n) {
    const auto p_n = out.pbar.level(n);
    const auto v_n = out.pbar_vel.level(n);

    std::fill(interior_mid.begin(), interior_mid.end(), 0.0);
    std::fill(neumann_plus.begin(), neumann_plus.end(), 0.0);
    if (rhs.f_pbar) {
      for (int m = 0; m < N; ++m)
        interior_mid[m] += 0.5 * (rhs.f_pbar->at(n, m) + rhs.f_pbar->at(n + 1, m));
    }
    if (with_shape) {
      const Vec bmid = detail::midpoint_of(base.pbar.level(n), base.pbar.level(n + 1));
      const Vec bvmid = detail::midpoint_of(base.pbar_vel.level(n), base.pbar_vel.level(n + 1));
      const Vec dd2_p = dD2.apply(bmid);
      const Vec dd2_v = dD2.apply(bvmid);
      for (int m = 0; m < N; ++m) interior_mid[m] += c2 * dd2_p[m] + params.b * dd2_v[m];
      for (int i = 1; i < dom.Nx - 1; ++i) {
        const detail::Row dr = detail::top_conormal_row(dom, dcoeffs.d_tau_x, dcoeffs.d_tau_z, i);
        neumann_plus[i] -= dr.dot(base.pbar.level(n + 1));
      }
    }
    if (rhs.f_N) {
      for (int i = 0; i < dom.Nx; ++i) neumann_plus[i] += rhs.f_N->at(n + 1, i);
    }
    PbarStep::Extras extras;
    extras.interior_mid = interior_mid.data();
    extras.neumann_plus = neumann_plus.data();
    const Vec v_plus =
        pstep.advance(p_n, v_n, dg.levels ? dg.level(n + 1).data() : nullptr, extras, out.stats_pbar);
    auto p_out = out.pbar.level(n + 1);
    auto v_out = out.pbar_vel.level(n + 1);
    for (int m = 0; m < N; ++m) {
      v_out[m] = v_plus[m];
      p_out[m] = p_n[m] + 0.5 * dt * (v_plus[m] + v_n[m]);
    }
  }

  // Stage 2: the coupled remainder/plate linearization. Step matrix is the
  // converged Newton Jacobian of the base solve.
  PtilStep step(params, coeffs, tg);
  LuSolver lu;
  bool factorized = false;
  const bool linear = params.k == 0.0;

  Vec f_row(step.size(), 0.0);
  for (int n = 0; n < Nt; ++n) {
    PtilStepInputs in;
    in.ptil_n = base.ptil.level(n);
    in.vtil_n = base.ptil_vel.level(n);
    in.wtil_n = base.wtil.level(n);
    in.om_n = base.wtil_vel.level(n);
    in.pbar_mid = detail::midpoint_of(base.pbar.level(n), base.pbar.level(n + 1));
    in.vbar_mid = detail::midpoint_of(base.pbar_vel.level(n), base.pbar_vel.level(n + 1));
    in.pbar_tt_mid = detail::quotient_of(base.pbar_vel.level(n), base.pbar_vel.level(n + 1), dt);
    in.h_mid.assign(Npl, 0.0);

    const Vec a_star(base.ptil_vel.level(n + 1).begin(), base.ptil_vel.level(n + 1).end());
    if (!linear || !factorized) {
      lu.factorize(step.jacobian(in, a_star));
      factorized = true;
    }

    Vec rvec = step.dR_dprev(in, a_star, out.ptil.level(n), out.ptil_vel.level(n),
                             out.wtil.level(n), out.wtil_vel.level(n));
    {
      const Vec dpbar_mid = detail::midpoint_of(out.pbar.level(n), out.pbar.level(n + 1));
      const Vec dvbar_mid = detail::midpoint_of(out.pbar_vel.level(n), out.pbar_vel.level(n + 1));
      const Vec dpbar_tt = detail::quotient_of(out.pbar_vel.level(n), out.pbar_vel.level(n + 1), dt);
      const Vec w = step.dR_dpbar(in, a_star, dpbar_mid, dvbar_mid, dpbar_tt);
      for (int m = 0; m < step.size(); ++m) rvec[m] += w[m];
    }
    if (with_shape) {
      const Vec w = step.dR_dprofile(in, a_star, dD2, dcoeffs.d_tau_x, dcoeffs.d_tau_z);
      for (int m = 0; m < step.size(); ++m) rvec[m] += w[m];
    }

    std::fill(f_row.begin(), f_row.end(), 0.0);
    if (rhs.f_ptil) {
      for (int m = 0; m < N; ++m)
        if (dom.classify(m / dom.nz(), m % dom.nz()) == NodeClass::Interior)
          f_row[m] += 0.5 * (rhs.f_ptil->at(n, m) + rhs.f_ptil->at(n + 1, m));
    }
    if (rhs.f_pl) {
      for (int i = 1; i < dom.Nx - 1; ++i) f_row[dom.idx(i, 0)] += rhs.f_pl->at(n + 1, i);
    }
    if (rhs.f_w) {
      for (int i = 1; i < Npl - 1; ++i)
        f_row[N + i] += 0.5 * (rhs.f_w->at(n, i) + rhs.f_w->at(n + 1, i));
    }
    if (dh.levels) {
      for (int i = 1; i < Npl - 1; ++i) f_row[N + i] += 0.5 * (dh.at(n, i) + dh.at(n + 1, i));
    }

    Vec b(step.size());
    for (int m = 0; m < step.size(); ++m) b[m] = -rvec[m] + f_row[m];
    double lin_res = 0.0;
    const Vec sol = lu.solve(b, &lin_res);
    out.stats_ptil.max_linear_residual = std::max(out.stats_ptil.max_linear_residual, lin_res);

    auto dp_out = out.ptil.level(n + 1);
    auto dv_out = out.ptil_vel.level(n + 1);
    for (int m = 0; m < N; ++m) {
      dv_out[m] = sol[m];
      dp_out[m] = out.ptil.at(n, m) + 0.5 * dt * (sol[m] + out.ptil_vel.at(n, m));
    }
    auto dw_out = out.wtil.level(n + 1);
    auto dom_out = out.wtil_vel.level(n + 1);
    for (int i = 0; i < Npl; ++i) {
      dom_out[i] = sol[N + i];
      dw_out[i] = out.wtil.at(n, i) + 0.5 * dt * (sol[N + i] + out.wtil_vel.at(n, i));
    }
  }
  out.compute_time_derivatives();
  return out;
}

}  // namespace aopt
