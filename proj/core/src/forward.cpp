// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/forward.hpp"

#include <cmath>

#include "step_common.hpp"

namespace aopt {

using detail::Row;

void PhysicalParams::validate() const {
  if (!(c > 0.0) || !(b > 0.0)) fail(ErrorKind::ConfigInvalid, "c and b must be positive");
  if (k < 0.0 || rho < 0.0 || delta < 0.0 || kappa < 0.0)
    fail(ErrorKind::ConfigInvalid, "k, rho, delta, kappa must be nonnegative");
  if (beta_a < 0.0 || gamma_a < 0.0) fail(ErrorKind::ConfigInvalid, "beta_a, gamma_a must be nonnegative");
  if (beta_pl < 0.0 || gamma_pl < 0.0)
    fail(ErrorKind::ConfigInvalid, "beta_pl, gamma_pl must be nonnegative");
}

InitialData InitialData::zero(const ReferenceDomain& dom) {
  InitialData init;
  init.p0.assign(dom.num_nodes(), 0.0);
  init.p1.assign(dom.num_nodes(), 0.0);
  init.w0.assign(dom.plate_nodes(), 0.0);
  init.w1.assign(dom.plate_nodes(), 0.0);
  return init;
}

double CompatibilityReport::max_abs() const {
  return std::max(std::max(gamma_a_order0, gamma_a_order1), std::max(gamma_pl_order0, gamma_pl_order1));
}

CompatibilityReport compatibility_residuals(const InitialData& init, const PhysicalParams& params,
                                            const MappedCoefficients& coeffs, const Vec& h_at_0) {
  const ReferenceDomain& dom = coeffs.dom;
  check_shape(static_cast<int>(init.p0.size()) == dom.num_nodes(), "compatibility_residuals");
  CompatibilityReport rep;

  const SparseOperator d2 = assemble_mapped_d2(coeffs);
  const SparseOperator plate = assemble_plate_bilaplacian(dom);
  const Vec lap_p0 = d2.apply(init.p0);
  const Vec lap_p1 = d2.apply(init.p1);
  Vec p2(dom.num_nodes(), 0.0);
  for (int n = 0; n < dom.num_nodes(); ++n) {
    const double alpha = 1.0 - 2.0 * params.k * init.p0[n];
    p2[n] = (params.c * params.c * lap_p0[n] + params.b * lap_p1[n]) / alpha;
  }
  const Vec bil_w0 = plate.apply(init.w0);
  Vec w2(dom.plate_nodes(), 0.0);
  if (params.rho > 0.0) {
    for (int i = 0; i < dom.plate_nodes(); ++i) {
      const double p1_pl = init.p1[dom.idx(i, 0)];
      w2[i] = (-params.delta * bil_w0[i] + params.kappa * p1_pl + h_at_0[i]) / params.rho;
    }
  }

  for (int side = 0; side < 2; ++side) {
    const int i = side == 0 ? 0 : dom.Nx - 1;
    for (int j = 0; j < dom.nz(); ++j) {
      const Row r = detail::side_outward_row(dom, i, j);
      const int n = dom.idx(i, j);
      rep.gamma_a_order0 = std::max(
          rep.gamma_a_order0,
          std::abs(r.dot(init.p0) + params.beta_a * init.p1[n] + params.gamma_a * init.p0[n]));
      rep.gamma_a_order1 = std::max(
          rep.gamma_a_order1,
          std::abs(r.dot(p2) + params.beta_a * p2[n] + params.gamma_a * init.p1[n]));
    }
  }
  for (int i = 1; i < dom.Nx - 1; ++i) {
    const Row r = detail::bottom_outward_row(dom, i);
    rep.gamma_pl_order0 =
        std::max(rep.gamma_pl_order0, std::abs(r.dot(init.p0) + params.rho * init.w1[i]));
    rep.gamma_pl_order1 = std::max(rep.gamma_pl_order1, std::abs(r.dot(init.p1) + params.rho * w2[i]));
  }
  return rep;
}

void solve_pbar(const PhysicalParams& params, const SpaceTimeField& g, const BoundaryProfile& profile,
                const ReferenceDomain& dom, const TimeGrid& tg, StateTrajectory& out) {
  params.validate();
  dom.validate();
  check_shape(g.levels == tg.Nt + 1 && g.n == dom.Nx, "solve_pbar: boundary data shape");

  const MappedCoefficients coeffs = transform_coefficients(profile, dom);
  detail::PbarStep step(params, coeffs, tg);

  const int N = dom.num_nodes();
  out.dom = dom;
  out.dt = tg.dt();
  out.T = tg.T;
  out.Nt = tg.Nt;
  out.pbar = SpaceTimeField(tg.Nt + 1, N);
  out.pbar_vel = SpaceTimeField(tg.Nt + 1, N);
  out.stats_pbar = SolveStats{};

  const double dt = tg.dt();
  for (int n = 0; n < tg.Nt; ++n) {
    const auto p_n = out.pbar.level(n);
    const auto v_n = out.pbar_vel.level(n);
    const Vec v_plus = step.advance(p_n, v_n, g.level(n + 1).data(), {}, out.stats_pbar);
    auto p_out = out.pbar.level(n + 1);
    auto v_out = out.pbar_vel.level(n + 1);
    for (int m = 0; m < N; ++m) {
      v_out[m] = v_plus[m];
      p_out[m] = p_n[m] + 0.5 * dt * (v_plus[m] + v_n[m]);
    }
  }
}

void solve_ptil_plate(const PhysicalParams& params, const SpaceTimeField& h,
                      const BoundaryProfile& profile, const ReferenceDomain& dom,
                      const InitialData& init, const TimeGrid& tg, StateTrajectory& inout) {
  params.validate();
  check_shape(h.levels == tg.Nt + 1 && h.n == dom.plate_nodes(), "solve_ptil_plate: forcing shape");
  check_shape(inout.pbar.levels == tg.Nt + 1 && inout.pbar.n == dom.num_nodes(),
              "solve_ptil_plate: extension field missing");

  const MappedCoefficients coeffs = transform_coefficients(profile, dom);
  detail::PtilStep step(params, coeffs, tg);

  const int N = dom.num_nodes();
  const int Npl = dom.plate_nodes();
  inout.ptil = SpaceTimeField(tg.Nt + 1, N);
  inout.ptil_vel = SpaceTimeField(tg.Nt + 1, N);
  inout.wtil = SpaceTimeField(tg.Nt + 1, Npl);
  inout.wtil_vel = SpaceTimeField(tg.Nt + 1, Npl);
  inout.stats_ptil = SolveStats{};
  inout.nondegeneracy_margin = 1.0;

  for (int m = 0; m < N; ++m) {
    inout.ptil.at(0, m) = init.p0[m];
    inout.ptil_vel.at(0, m) = init.p1[m];
  }
  for (int i = 0; i < Npl; ++i) {
    inout.wtil.at(0, i) = init.w0[i];
    inout.wtil_vel.at(0, i) = init.w1[i];
  }

  const double dt = tg.dt();
  const bool linear = params.k == 0.0;
  detail::LuSolver lu;
  bool factorized = false;

  for (int n = 0; n < tg.Nt; ++n) {
    detail::PtilStepInputs in;
    in.ptil_n = inout.ptil.level(n);
    in.vtil_n = inout.ptil_vel.level(n);
    in.wtil_n = inout.wtil.level(n);
    in.om_n = inout.wtil_vel.level(n);
    in.pbar_mid = detail::midpoint_of(inout.pbar.level(n), inout.pbar.level(n + 1));
    in.vbar_mid = detail::midpoint_of(inout.pbar_vel.level(n), inout.pbar_vel.level(n + 1));
    in.pbar_tt_mid = detail::quotient_of(inout.pbar_vel.level(n), inout.pbar_vel.level(n + 1), dt);
    in.h_mid = detail::midpoint_of(h.level(n), h.level(n + 1));

    Vec a(in.vtil_n.begin(), in.vtil_n.end());
    Vec om(in.om_n.begin(), in.om_n.end());

    double margin = 1.0;
    Vec R = step.residual(in, a, om, &margin);
    if (margin <= 0.1)
      fail(ErrorKind::NonDegeneracyViolated,
           "leading coefficient margin " + to17(margin) + " at step " + std::to_string(n));
    inout.nondegeneracy_margin = std::min(inout.nondegeneracy_margin, margin);

    double rnorm = 0.0;
    for (double r : R) rnorm = std::max(rnorm, std::abs(r));
    const double tol = 1e-10 * (1.0 + rnorm);

    int iter = 0;
    while (rnorm > tol) {
      if (++iter > 25) fail(ErrorKind::NewtonDiverged, "Newton stalled at step " + std::to_string(n));
      if (!linear || !factorized) {
        lu.factorize(step.jacobian(in, a));
        factorized = true;
      }
      Vec negR(R.size());
      for (size_t m = 0; m < R.size(); ++m) negR[m] = -R[m];
      double lin_res = 0.0;
      const Vec delta = lu.solve(negR, &lin_res);
      if (lin_res > 1e-8) inout.stats_ptil.step_too_large = true;
      inout.stats_ptil.max_linear_residual = std::max(inout.stats_ptil.max_linear_residual, lin_res);
      for (int m = 0; m < N; ++m) a[m] += delta[m];
      for (int i = 0; i < Npl; ++i) om[i] += delta[N + i];

      R = step.residual(in, a, om, &margin);
      if (margin <= 0.1)
        fail(ErrorKind::NonDegeneracyViolated,
             "leading coefficient margin " + to17(margin) + " at step " + std::to_string(n));
      inout.nondegeneracy_margin = std::min(inout.nondegeneracy_margin, margin);
      rnorm = 0.0;
      for (double r : R) rnorm = std::max(rnorm, std::abs(r));
    }
    inout.stats_ptil.total_newton_iters += iter;
    inout.stats_ptil.max_newton_iters = std::max(inout.stats_ptil.max_newton_iters, iter);

    auto p_out = inout.ptil.level(n + 1);
    auto v_out = inout.ptil_vel.level(n + 1);
    for (int m = 0; m < N; ++m) {
      v_out[m] = a[m];
      p_out[m] = in.ptil_n[m] + 0.5 * dt * (a[m] + in.vtil_n[m]);
    }
    auto w_out = inout.wtil.level(n + 1);
    auto om_out = inout.wtil_vel.level(n + 1);
    for (int i = 0; i < Npl; ++i) {
      om_out[i] = om[i];
      w_out[i] = in.wtil_n[i] + 0.5 * dt * (om[i] + in.om_n[i]);
    }
  }
  inout.compute_time_derivatives();
}

StateTrajectory solve_forward(const PhysicalParams& params, const SpaceTimeField& g,
                              const SpaceTimeField& h, const BoundaryProfile& profile,
                              const ReferenceDomain& dom, const InitialData& init, const TimeGrid& tg) {
  StateTrajectory traj;
  solve_pbar(params, g, profile, dom, tg, traj);
  solve_ptil_plate(params, h, profile, dom, init, tg, traj);
  return traj;
}

}  // namespace aopt
