// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/adjoint.hpp"

#include <cmath>

#include "step_common.hpp"

namespace aopt {

using detail::LuSolver;
using detail::Row;

AdjointTrajectory solve_adjoint(const PhysicalParams& params, const StateTrajectory& states,
                                const Targets& targets, const BoundaryProfile& profile,
                                const ReferenceDomain& dom) {
  params.validate();
  const int N = dom.num_nodes();
  const int Npl = dom.plate_nodes();
  const int Nt = states.Nt;
  const double dt = states.dt;
  check_shape(states.pbar.n == N && targets.p_d.n == N && targets.w_d.n == Npl, "solve_adjoint: shapes");
  check_shape(static_cast<int>(targets.roi_mask.size()) == N, "solve_adjoint: roi mask");
  if (std::abs(params.beta_a - 1.0 / params.c) > 1e-12 * (1.0 + 1.0 / params.c) || params.gamma_a != 0.0)
    fail(ErrorKind::UnsupportedAbsorbingCoefficients,
         "adjoint requires beta_a = 1/c and gamma_a = 0");
  if (states.nondegeneracy_margin <= 0.1)
    fail(ErrorKind::NonDegeneracyViolated, "state trajectory is degenerate");

  const MappedCoefficients coeffs = transform_coefficients(profile, dom);
  const SparseOperator d2 = assemble_mapped_d2(coeffs);
  const SparseOperator plate = assemble_plate_bilaplacian(dom);
  SparseOperator plate_damping;
  if (params.beta_pl > 0.0) plate_damping = assemble_plate_fractional(dom, params.gamma_pl);

  AdjointTrajectory adj;
  adj.dom = dom;
  adj.dt = dt;
  adj.T = states.T;
  adj.Nt = Nt;
  adj.qbar = SpaceTimeField(Nt + 1, N);
  adj.qbar_vel = SpaceTimeField(Nt + 1, N);
  adj.qtil = SpaceTimeField(Nt + 1, N);
  adj.qtil_vel = SpaceTimeField(Nt + 1, N);
  adj.vtil = SpaceTimeField(Nt + 1, Npl);
  adj.vtil_vel = SpaceTimeField(Nt + 1, Npl);

  const double c2 = params.c * params.c;
  const double k = params.k;
  const int size = 2 * N + Npl;
  const double wd2 = c2 * dt / 4.0 + params.b / 2.0;

  const bool linear = params.k == 0.0;
  LuSolver lu;
  bool factorized = false;

  // march backward: unknowns are the velocities at level n and the plate
  // adjoint rate; displacements reconstruct from the trapezoidal update.
  for (int n = Nt - 1; n >= 0; --n) {
    Vec total_mid(N);  // pbar + ptil at the interval midpoint
    for (int m = 0; m < N; ++m)
      total_mid[m] = 0.5 * (states.pbar.at(n, m) + states.pbar.at(n + 1, m) + states.ptil.at(n, m) +
                            states.ptil.at(n + 1, m));
    // stationarity of the Lagrangian puts the misfit on the left, so the
    // wave rows see minus the tracking residual
    Vec src_mid(N);
    for (int m = 0; m < N; ++m) {
      src_mid[m] = -targets.roi_mask[m] *
                   (total_mid[m] - 0.5 * (targets.p_d.at(n, m) + targets.p_d.at(n + 1, m)));
    }

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(24 * static_cast<size_t>(N));
    Vec rhs(size, 0.0);

    // known level n+1 values
    const auto qb_p = adj.qbar.level(n + 1);
    const auto qbt_p = adj.qbar_vel.level(n + 1);
    const auto qt_p = adj.qtil.level(n + 1);
    const auto qtt_p = adj.qtil_vel.level(n + 1);
    const auto vt_p = adj.vtil.level(n + 1);
    const auto om_p = adj.vtil_vel.level(n + 1);

    // "known" parts of the midpoint/endpoint reconstructions
    Vec qb_known(N), qbt_known_half(N), qt_known(N), qtt_known_half(N);
    for (int m = 0; m < N; ++m) {
      qb_known[m] = qb_p[m] - 0.25 * dt * qbt_p[m];   // qbar_mid = qb_known - (dt/4) x
      qbt_known_half[m] = 0.5 * qbt_p[m];             // qbar_t_mid = this + x/2
      qt_known[m] = qt_p[m] - 0.25 * dt * qtt_p[m];
      qtt_known_half[m] = 0.5 * qtt_p[m];
    }
    const Vec d2_qb_known = d2.apply(qb_known);
    const Vec d2_qbt_known = d2.apply(qbt_known_half);
    const Vec d2_qt_known = d2.apply(qt_known);
    const Vec d2_qtt_known = d2.apply(qtt_known_half);

    for (int i = 0; i < dom.Nx; ++i) {
      for (int j = 0; j < dom.nz(); ++j) {
        const int m = dom.idx(i, j);
        const int row_b = 2 * m;
        const int row_t = 2 * m + 1;
        switch (dom.classify(i, j)) {
          case NodeClass::Interior: {
            // qbar row: qbar_tt - c^2 D2 qbar + b D2 qbar_t
            //           = src + 2k(total) qtil_tt
            trip.emplace_back(row_b, row_b, -1.0 / dt);
            trip.emplace_back(row_b, row_t, 2.0 * k * total_mid[m] / dt);
            rhs[row_b] = -(qbt_p[m] / dt - c2 * d2_qb_known[m] + params.b * d2_qbt_known[m] -
                           src_mid[m] - 2.0 * k * total_mid[m] * qtt_p[m] / dt);
            // qtil row
            const double alpha = 1.0 - 2.0 * k * total_mid[m];
            trip.emplace_back(row_t, row_t, -alpha / dt);
            rhs[row_t] = -(alpha * qtt_p[m] / dt - c2 * d2_qt_known[m] + params.b * d2_qtt_known[m] -
                           src_mid[m]);
            break;
          }
          case NodeClass::GammaA: {
            // c d_nu q - q_t = 0 at the unknown level: the time-reversed
            // absorbing row (the duality partner of the forward condition)
            const Row r = detail::side_outward_row(dom, i, j);
            for (const auto& [mm, v] : r.e) {
              trip.emplace_back(row_b, 2 * mm, -params.c * 0.5 * dt * v);
              trip.emplace_back(row_t, 2 * mm + 1, -params.c * 0.5 * dt * v);
            }
            trip.emplace_back(row_b, row_b, -1.0);
            trip.emplace_back(row_t, row_t, -1.0);
            double known_b = 0.0, known_t = 0.0;
            for (const auto& [mm, v] : r.e) {
              known_b += v * (qb_p[mm] - 0.5 * dt * qbt_p[mm]);
              known_t += v * (qt_p[mm] - 0.5 * dt * qtt_p[mm]);
            }
            rhs[row_b] = -params.c * known_b;
            rhs[row_t] = -params.c * known_t;
            break;
          }
          case NodeClass::GammaN: {
            // homogeneous conormal trace at the unknown level
            const Row r = detail::top_conormal_row(dom, coeffs.tau_x, coeffs.tau_z, i);
            for (const auto& [mm, v] : r.e) {
              trip.emplace_back(row_b, 2 * mm, -0.5 * dt * v);
              trip.emplace_back(row_t, 2 * mm + 1, -0.5 * dt * v);
            }
            double known_b = 0.0, known_t = 0.0;
            for (const auto& [mm, v] : r.e) {
              known_b += v * (qb_p[mm] - 0.5 * dt * qbt_p[mm]);
              known_t += v * (qt_p[mm] - 0.5 * dt * qtt_p[mm]);
            }
            rhs[row_b] = -known_b;
            rhs[row_t] = -known_t;
            break;
          }
          case NodeClass::GammaPl: {
            // rho vtil_t = [-b d_t + c^2] d_z q, enforced for both adjoints
            Row r;  // d/dz one-sided upward at the plate edge
            {
              const double dz = dom.dz_above(0);
              r.add(dom.idx(i, 0), -3.0 / (2.0 * dz));
              r.add(dom.idx(i, 1), 4.0 / (2.0 * dz));
              r.add(dom.idx(i, 2), -1.0 / (2.0 * dz));
            }
            for (const auto& [mm, v] : r.e) {
              trip.emplace_back(row_b, 2 * mm, (params.b + 0.5 * dt * c2) * v);
              trip.emplace_back(row_t, 2 * mm + 1, (params.b + 0.5 * dt * c2) * v);
            }
            trip.emplace_back(row_b, 2 * N + i, params.rho);
            trip.emplace_back(row_t, 2 * N + i, params.rho);
            double known_b = 0.0, known_t = 0.0;
            for (const auto& [mm, v] : r.e) {
              known_b += v * (qb_p[mm] - 0.5 * dt * qbt_p[mm]);
              known_t += v * (qt_p[mm] - 0.5 * dt * qtt_p[mm]);
            }
            rhs[row_b] = c2 * known_b;
            rhs[row_t] = c2 * known_t;
            break;
          }
        }
      }
    }

    // plate adjoint rows
    Vec v_known(Npl);
    for (int i = 0; i < Npl; ++i) v_known[i] = vt_p[i] - 0.25 * dt * om_p[i];
    const Vec bil_v_known = plate.apply(v_known);
    Vec damp_known;
    if (params.beta_pl > 0.0) {
      Vec om_half(Npl);
      for (int i = 0; i < Npl; ++i) om_half[i] = 0.5 * om_p[i];
      damp_known = plate_damping.apply(om_half);
    }
    for (int i = 0; i < Npl; ++i) {
      const int row = 2 * N + i;
      if (i == 0 || i == Npl - 1) {
        trip.emplace_back(row, row, 1.0);
        rhs[row] = 0.0;
        continue;
      }
      const int m_pl = dom.idx(i, 0);
      trip.emplace_back(row, row, -params.rho / dt);
      trip.emplace_back(row, 2 * m_pl + 1, -params.kappa * (params.b / dt + 0.5 * c2));
      const double w_mis =
          0.5 * (states.wtil.at(n, i) + states.wtil.at(n + 1, i) - targets.w_d.at(n, i) -
                 targets.w_d.at(n + 1, i));
      const double mis_scale = params.rho > 0.0 ? params.kappa / params.rho : 0.0;
      rhs[row] = -(params.rho * om_p[i] / dt + params.delta * bil_v_known[i] -
                   params.kappa * (-params.b * qtt_p[m_pl] / dt + 0.5 * c2 * qtt_p[m_pl]) +
                   mis_scale * w_mis);
      if (params.beta_pl > 0.0) rhs[row] -= params.beta_pl * damp_known[i];
    }
    // plate stiffness and damping acting on the unknown rate
    for (const auto& e : plate.entries()) {
      if (e.row == 0 || e.row == Npl - 1) continue;
      trip.emplace_back(2 * N + e.row, 2 * N + e.col, -params.delta * 0.25 * dt * e.value);
    }
    if (params.beta_pl > 0.0) {
      for (const auto& e : plate_damping.entries()) {
        if (e.row == 0 || e.row == Npl - 1) continue;
        trip.emplace_back(2 * N + e.row, 2 * N + e.col, 0.5 * params.beta_pl * e.value);
      }
    }
    // D2 acting on the unknown velocities in the interior rows
    for (const auto& e : d2.entries()) {
      const int i = e.row / dom.nz();
      const int j = e.row % dom.nz();
      if (dom.classify(i, j) != NodeClass::Interior) continue;
      trip.emplace_back(2 * e.row, 2 * e.col, wd2 * e.value);
      trip.emplace_back(2 * e.row + 1, 2 * e.col + 1, wd2 * e.value);
    }

    if (!linear || !factorized) {
      Eigen::SparseMatrix<double> A(size, size);
      A.setFromTriplets(trip.begin(), trip.end());
      lu.factorize(A);
      factorized = true;
    }
    const Vec sol = lu.solve(rhs);

    auto qb_n = adj.qbar.level(n);
    auto qbt_n = adj.qbar_vel.level(n);
    auto qt_n = adj.qtil.level(n);
    auto qtt_n = adj.qtil_vel.level(n);
    for (int m = 0; m < N; ++m) {
      qbt_n[m] = sol[2 * m];
      qtt_n[m] = sol[2 * m + 1];
      qb_n[m] = qb_p[m] - 0.5 * dt * (qbt_p[m] + qbt_n[m]);
      qt_n[m] = qt_p[m] - 0.5 * dt * (qtt_p[m] + qtt_n[m]);
    }
    auto vt_n = adj.vtil.level(n);
    auto om_n = adj.vtil_vel.level(n);
    for (int i = 0; i < Npl; ++i) {
      om_n[i] = sol[2 * N + i];
      vt_n[i] = vt_p[i] - 0.5 * dt * (om_p[i] + om_n[i]);
    }
  }
  return adj;
}

void extract_multipliers(AdjointTrajectory& adj, const PhysicalParams& params,
                         const BoundaryProfile& profile) {
  (void)profile;
  const ReferenceDomain& dom = adj.dom;
  const int levels = adj.levels();
  const int J = dom.nz() - 1;

  SpaceTimeField trace_N(levels, dom.Nx), trace_pl(levels, dom.plate_nodes());
  for (int t = 0; t < levels; ++t) {
    for (int i = 0; i < dom.Nx; ++i) {
      trace_N.at(t, i) = adj.qbar.at(t, dom.idx(i, J));
      trace_pl.at(t, i) = adj.qtil.at(t, dom.idx(i, 0));
    }
  }
  const SpaceTimeField dtrace_N = fd_time_derivative(trace_N, adj.dt);
  const SpaceTimeField dtrace_pl = fd_time_derivative(trace_pl, adj.dt);

  const double c2 = params.c * params.c;
  adj.mu_N = SpaceTimeField(levels, dom.Nx);
  adj.mu_pl = SpaceTimeField(levels, dom.plate_nodes());
  for (int t = 0; t < levels; ++t) {
    for (int i = 0; i < dom.Nx; ++i) {
      adj.mu_N.at(t, i) = c2 * trace_N.at(t, i) - params.b * dtrace_N.at(t, i);
      adj.mu_pl.at(t, i) = c2 * trace_pl.at(t, i) - params.b * dtrace_pl.at(t, i);
    }
  }
}

}  // namespace aopt
