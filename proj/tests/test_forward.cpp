// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "aopt/forward.hpp"
#include "aopt/linearized.hpp"
#include "aopt/oracle.hpp"
#include "aopt/residual.hpp"
#include "doctest.h"

using namespace aopt;

namespace {

ReferenceDomain make_domain(int nx, int nz_fix, int nz_var) {
  ReferenceDomain dom;
  dom.Lx = 1.0;
  dom.H_fix = nz_fix > 0 ? 0.25 : 0.0;
  dom.ell0 = 1.0;
  dom.Nx = nx;
  dom.Nz_fix = nz_fix;
  dom.Nz_var = nz_var;
  return dom;
}

PhysicalParams small_params(double k) {
  PhysicalParams p;
  p.c = 1.0;
  p.b = 0.1;
  p.k = k;
  p.rho = 1.0;
  p.delta = 0.2;
  p.kappa = 0.8;
  p.beta_a = 1.0;
  p.gamma_a = 0.0;
  return p;
}

BoundaryProfile clamped_bump(const ReferenceDomain& dom, double amp) {
  BoundaryProfile p = constant_profile(dom);
  for (int i = 2; i < dom.Nx - 2; ++i) {
    const double xf = static_cast<double>(i) / (dom.Nx - 1);
    p.ell[i] += amp * std::pow(std::sin(M_PI * xf), 4);
  }
  return p;
}

SpaceTimeField smooth_g(const ReferenceDomain& dom, const TimeGrid& tg, double amp) {
  SpaceTimeField g(tg.Nt + 1, dom.Nx);
  for (int n = 0; n <= tg.Nt; ++n) {
    const double t = n * tg.dt();
    const double win = std::sin(M_PI * t / tg.T);
    for (int i = 0; i < dom.Nx; ++i) {
      const double x = dom.x(i);
      g.at(n, i) = amp * win * win * std::sin(2.0 * M_PI * t / tg.T) *
                   std::exp(-8.0 * (x - 0.5) * (x - 0.5));
    }
  }
  for (int i = 0; i < dom.Nx; ++i) {
    g.at(0, i) = 0.0;
    g.at(1, i) = 0.0;
  }
  return g;
}

SpaceTimeField smooth_h(const ReferenceDomain& dom, const TimeGrid& tg, double amp) {
  SpaceTimeField h(tg.Nt + 1, dom.plate_nodes());
  for (int n = 0; n <= tg.Nt; ++n) {
    const double t = n * tg.dt();
    const double win = std::sin(M_PI * t / tg.T);
    for (int i = 0; i < dom.plate_nodes(); ++i) {
      const double x = dom.x(i);
      h.at(n, i) = amp * win * win * std::sin(M_PI * x);
    }
  }
  for (int i = 0; i < dom.plate_nodes(); ++i) h.at(0, i) = 0.0;
  return h;
}

}  // namespace

TEST_CASE("zero data keeps both fields at rest") {
  const ReferenceDomain dom = make_domain(9, 3, 7);
  const TimeGrid tg{0.5, 8};
  const PhysicalParams params = small_params(0.4);
  const SpaceTimeField g(tg.Nt + 1, dom.Nx), h(tg.Nt + 1, dom.plate_nodes());
  const StateTrajectory traj = solve_forward(params, g, h, clamped_bump(dom, 0.1), dom,
                                             InitialData::zero(dom), tg);
  for (double v : traj.pbar.data) CHECK(v == 0.0);
  for (double v : traj.ptil.data) CHECK(std::abs(v) < 1e-14);
  for (double v : traj.wtil.data) CHECK(std::abs(v) < 1e-14);
  CHECK(traj.nondegeneracy_margin == doctest::Approx(1.0));
}

TEST_CASE("forward solves are bit-deterministic") {
  const ReferenceDomain dom = make_domain(9, 3, 9);
  const TimeGrid tg{0.5, 8};
  const PhysicalParams params = small_params(0.6);
  const SpaceTimeField g = smooth_g(dom, tg, 0.2);
  const SpaceTimeField h = smooth_h(dom, tg, 0.2);
  const BoundaryProfile prof = clamped_bump(dom, 0.1);
  const StateTrajectory a = solve_forward(params, g, h, prof, dom, InitialData::zero(dom), tg);
  const StateTrajectory b = solve_forward(params, g, h, prof, dom, InitialData::zero(dom), tg);
  CHECK(a.ptil.data == b.ptil.data);
  CHECK(a.pbar.data == b.pbar.data);
  CHECK(a.wtil_vel.data == b.wtil_vel.data);
}

TEST_CASE("stored discrete derivatives are finite differences of the fields") {
  const ReferenceDomain dom = make_domain(9, 3, 7);
  const TimeGrid tg{0.5, 8};
  const PhysicalParams params = small_params(0.0);
  const StateTrajectory traj = solve_forward(params, smooth_g(dom, tg, 0.3), smooth_h(dom, tg, 0.1),
                                             constant_profile(dom), dom, InitialData::zero(dom), tg);
  const double dt = tg.dt();
  for (int n = 1; n < tg.Nt; ++n)
    for (int m = 0; m < dom.num_nodes(); m += 7) {
      const double fd = (traj.ptil.at(n + 1, m) - traj.ptil.at(n - 1, m)) / (2.0 * dt);
      CHECK(traj.ptil_t.at(n, m) == doctest::Approx(fd).epsilon(1e-12));
      const double fd2 =
          (traj.ptil.at(n + 1, m) - 2.0 * traj.ptil.at(n, m) + traj.ptil.at(n - 1, m)) / (dt * dt);
      CHECK(traj.ptil_tt.at(n, m) == doctest::Approx(fd2).epsilon(1e-10));
    }
}

TEST_CASE("linear solve matches an independent dense assembly on a tiny grid") {
  // k = 0, dense per-step systems built from the coefficient fields with
  // separate stencil code and the full (p, v, w, omega) unknown vector
  const ReferenceDomain dom = make_domain(9, 3, 7);
  const TimeGrid tg{0.25, 6};
  PhysicalParams params = small_params(0.0);
  params.gamma_a = 0.3;  // exercise the general absorbing row
  const BoundaryProfile prof = clamped_bump(dom, 0.12);
  const SpaceTimeField g = smooth_g(dom, tg, 0.4);
  const SpaceTimeField h = smooth_h(dom, tg, 0.5);
  const StateTrajectory mine = solve_forward(params, g, h, prof, dom, InitialData::zero(dom), tg);

  const MappedCoefficients mc = transform_coefficients(prof, dom);
  const int N = dom.num_nodes();
  const int Npl = dom.plate_nodes();
  const int nz = dom.nz();
  const double dt = tg.dt();
  const double dx = dom.dx();
  const double c2 = params.c * params.c;

  Eigen::MatrixXd D2 = Eigen::MatrixXd::Zero(N, N);
  for (int i = 1; i < dom.Nx - 1; ++i) {
    for (int j = 1; j < nz - 1; ++j) {
      const int n = dom.idx(i, j);
      D2(n, dom.idx(i - 1, j)) += 1.0 / (dx * dx);
      D2(n, n) += -2.0 / (dx * dx);
      D2(n, dom.idx(i + 1, j)) += 1.0 / (dx * dx);
      if (dom.has_fix() && j == dom.j_interface()) {
        const double hb = dom.dz_fix(), ha = mc.h_plus[i];
        D2(n, dom.idx(i, j - 1)) += 2.0 / (hb * (hb + ha));
        D2(n, n) += -2.0 / (hb * ha);
        D2(n, dom.idx(i, j + 1)) += 2.0 / (ha * (hb + ha));
        continue;
      }
      const double dz = j < dom.j_interface() ? dom.dz_fix() : dom.dz_var();
      D2(n, dom.idx(i, j - 1)) += mc.c_zz[n] / (dz * dz);
      D2(n, n) += -2.0 * mc.c_zz[n] / (dz * dz);
      D2(n, dom.idx(i, j + 1)) += mc.c_zz[n] / (dz * dz);
      if (j > dom.j_interface()) {
        const double a = mc.c_cross[n] / (4.0 * dx * dz);
        D2(n, dom.idx(i + 1, j + 1)) += a;
        D2(n, dom.idx(i - 1, j - 1)) += a;
        D2(n, dom.idx(i + 1, j - 1)) -= a;
        D2(n, dom.idx(i - 1, j + 1)) -= a;
        const double bz = mc.c_z[n] / (2.0 * dz);
        D2(n, dom.idx(i, j + 1)) += bz;
        D2(n, dom.idx(i, j - 1)) -= bz;
      }
    }
  }
  Eigen::MatrixXd PL = Eigen::MatrixXd::Zero(Npl, Npl);
  {
    const double h4 = std::pow(dx, 4);
    for (int i = 2; i < Npl - 2; ++i) {
      PL(i, i - 2) = 1.0 / h4;
      PL(i, i - 1) = -4.0 / h4;
      PL(i, i) = 6.0 / h4;
      PL(i, i + 1) = -4.0 / h4;
      PL(i, i + 2) = 1.0 / h4;
    }
    PL(1, 0) = -2.0 / h4;
    PL(1, 1) = 5.0 / h4;
    PL(1, 2) = -4.0 / h4;
    PL(1, 3) = 1.0 / h4;
    PL(Npl - 2, Npl - 1) = -2.0 / h4;
    PL(Npl - 2, Npl - 2) = 5.0 / h4;
    PL(Npl - 2, Npl - 3) = -4.0 / h4;
    PL(Npl - 2, Npl - 4) = 1.0 / h4;
  }

  // unknown layout per level: [p (N); v (N); w (Npl); om (Npl)]
  const int sz = 2 * N + 2 * Npl;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(sz, sz);
  const auto P = [&](int n) { return n; };
  const auto V = [N](int n) { return N + n; };
  const auto W = [N](int i) { return 2 * N + i; };
  const auto OM = [N, Npl](int i) { return 2 * N + Npl + i; };

  for (int n = 0; n < N; ++n) {
    A(P(n), P(n)) = 1.0;
    A(P(n), V(n)) = -0.5 * dt;
  }
  for (int i = 0; i < Npl; ++i) {
    A(W(i), W(i)) = 1.0;
    A(W(i), OM(i)) = -0.5 * dt;
  }
  for (int i = 0; i < dom.Nx; ++i) {
    for (int j = 0; j < nz; ++j) {
      const int n = dom.idx(i, j);
      const int row = V(n);
      switch (dom.classify(i, j)) {
        case NodeClass::Interior:
          A(row, V(n)) += 1.0 / dt;
          for (int m = 0; m < N; ++m) {
            A(row, P(m)) += -0.5 * c2 * D2(n, m);
            A(row, V(m)) += -0.5 * params.b * D2(n, m);
          }
          break;
        case NodeClass::GammaA: {
          const int dir = i == 0 ? 1 : -1;
          A(row, P(dom.idx(i, j))) += 3.0 / (2.0 * dx) + params.gamma_a;
          A(row, P(dom.idx(i + dir, j))) += -4.0 / (2.0 * dx);
          A(row, P(dom.idx(i + 2 * dir, j))) += 1.0 / (2.0 * dx);
          A(row, V(n)) += params.beta_a;
          break;
        }
        case NodeClass::GammaN: {
          const double dzv = dom.dz_var();
          A(row, P(dom.idx(i + 1, nz - 1))) += mc.tau_x[i] / (2.0 * dx);
          A(row, P(dom.idx(i - 1, nz - 1))) += -mc.tau_x[i] / (2.0 * dx);
          A(row, P(dom.idx(i, nz - 1))) += 3.0 * mc.tau_z[i] / (2.0 * dzv);
          A(row, P(dom.idx(i, nz - 2))) += -4.0 * mc.tau_z[i] / (2.0 * dzv);
          A(row, P(dom.idx(i, nz - 3))) += mc.tau_z[i] / (2.0 * dzv);
          break;
        }
        case NodeClass::GammaPl: {
          const double dzf = dom.dz_above(0);
          A(row, P(dom.idx(i, 0))) += 3.0 / (2.0 * dzf);
          A(row, P(dom.idx(i, 1))) += -4.0 / (2.0 * dzf);
          A(row, P(dom.idx(i, 2))) += 1.0 / (2.0 * dzf);
          A(row, OM(i)) += params.rho;
          break;
        }
      }
    }
  }
  for (int i = 0; i < Npl; ++i) {
    const int row = OM(i);
    if (i == 0 || i == Npl - 1) {
      A(row, OM(i)) = 1.0;
      continue;
    }
    A(row, OM(i)) += params.rho / dt;
    for (int m = 0; m < Npl; ++m) A(row, W(m)) += 0.5 * params.delta * PL(i, m);
    A(row, V(dom.idx(i, 0))) += -0.5 * params.kappa;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(sz);
  double max_diff = 0.0;
  Eigen::VectorXd rhs(sz);
  for (int n = 0; n < tg.Nt; ++n) {
    rhs.setZero();
    Vec vbar_mid(N);
    for (int m = 0; m < N; ++m)
      vbar_mid[m] = 0.5 * (mine.pbar_vel.at(n, m) + mine.pbar_vel.at(n + 1, m));
    for (int m = 0; m < N; ++m) rhs(P(m)) = y(P(m)) + 0.5 * dt * y(V(m));
    for (int i = 0; i < Npl; ++i) rhs(W(i)) = y(W(i)) + 0.5 * dt * y(OM(i));
    for (int i = 1; i < dom.Nx - 1; ++i) {
      for (int j = 1; j < nz - 1; ++j) {
        const int m = dom.idx(i, j);
        double lap_p = 0.0, lap_v = 0.0;
        for (int q = 0; q < N; ++q) {
          lap_p += D2(m, q) * y(P(q));
          lap_v += D2(m, q) * y(V(q));
        }
        rhs(V(m)) = y(V(m)) / dt + 0.5 * c2 * lap_p + 0.5 * params.b * lap_v;
      }
    }
    for (int i = 1; i < Npl - 1; ++i) {
      double lap_w = 0.0;
      for (int m = 0; m < Npl; ++m) lap_w += PL(i, m) * y(W(m));
      const double h_mid = 0.5 * (h.at(n, i) + h.at(n + 1, i));
      rhs(OM(i)) = params.rho * y(OM(i)) / dt - 0.5 * params.delta * lap_w +
                   0.5 * params.kappa * y(V(dom.idx(i, 0))) +
                   params.kappa * vbar_mid[dom.idx(i, 0)] + h_mid;
    }
    y = lu.solve(rhs);
    for (int m = 0; m < N; ++m) {
      max_diff = std::max(max_diff, std::abs(y(P(m)) - mine.ptil.at(n + 1, m)));
      max_diff = std::max(max_diff, std::abs(y(V(m)) - mine.ptil_vel.at(n + 1, m)));
    }
    for (int i = 0; i < Npl; ++i)
      max_diff = std::max(max_diff, std::abs(y(W(i)) - mine.wtil.at(n + 1, i)));
  }
  CHECK(max_diff < 1e-9);
}

TEST_CASE("small nonlinearity perturbs the solution at order k") {
  const ReferenceDomain dom = make_domain(9, 3, 9);
  const TimeGrid tg{0.5, 8};
  const BoundaryProfile prof = constant_profile(dom);
  const SpaceTimeField g = smooth_g(dom, tg, 0.3);
  const SpaceTimeField h = smooth_h(dom, tg, 0.2);
  const StateTrajectory base =
      solve_forward(small_params(0.0), g, h, prof, dom, InitialData::zero(dom), tg);
  const StateTrajectory tiny =
      solve_forward(small_params(1e-8), g, h, prof, dom, InitialData::zero(dom), tg);
  const double diff = trajectory_distance(base, tiny, dom);
  CHECK(diff < 1e-6);  // O(k) with k = 1e-8
}

TEST_CASE("extension-field self convergence under space-time refinement") {
  // probe values on a shared coarse space-time lattice; differences between
  // consecutive refinements shrink at second order
  const PhysicalParams params = small_params(0.0);
  std::vector<Vec> probes;
  for (const int lvl : {0, 1, 2}) {
    const int scale = 1 << lvl;
    const int nx = 8 * scale + 1;
    const ReferenceDomain dom = make_domain(nx, 2 * scale + 1, nx);
    const TimeGrid tg{0.5, 8 * scale};
    const BoundaryProfile prof = clamped_bump(dom, 0.15);
    StateTrajectory traj;
    solve_pbar(params, smooth_g(dom, tg, 0.5), prof, dom, tg, traj);
    Vec samples;
    for (int nc = 1; nc <= 4; ++nc) {
      const int n = nc * 2 * scale;
      for (int ic = 1; ic <= 3; ++ic)
        for (int jc = 1; jc <= 3; ++jc) {
          const int i = ic * 2 * scale;
          const int j = jc * 2 * scale;
          samples.push_back(traj.pbar.at(n, dom.idx(i, j)));
        }
    }
    probes.push_back(samples);
  }
  double d01 = 0.0, d12 = 0.0;
  for (size_t m = 0; m < probes[0].size(); ++m) {
    d01 = std::max(d01, std::abs(probes[0][m] - probes[1][m]));
    d12 = std::max(d12, std::abs(probes[1][m] - probes[2][m]));
  }
  const double order = std::log2(d01 / d12);
  CHECK(order >= 1.9);
}

TEST_CASE("constraint pairing") {
  const ReferenceDomain dom = make_domain(9, 3, 9);
  const TimeGrid tg{0.5, 8};
  const PhysicalParams params = small_params(0.8);
  const BoundaryProfile prof = clamped_bump(dom, 0.1);
  const SpaceTimeField g = smooth_g(dom, tg, 0.25);
  const SpaceTimeField h = smooth_h(dom, tg, 0.3);
  const int N = dom.num_nodes();

  TestTuple tests;
  tests.qbar = SpaceTimeField(tg.Nt + 1, N);
  tests.qtil = SpaceTimeField(tg.Nt + 1, N);
  tests.vtil = SpaceTimeField(tg.Nt + 1, dom.plate_nodes());
  tests.mu_N = SpaceTimeField(tg.Nt + 1, dom.Nx);
  tests.mu_pl = SpaceTimeField(tg.Nt + 1, dom.plate_nodes());

  SUBCASE("zero states, controls and tests give zero") {
    StateTrajectory traj;
    traj.dom = dom;
    traj.dt = tg.dt();
    traj.T = tg.T;
    traj.Nt = tg.Nt;
    traj.pbar = SpaceTimeField(tg.Nt + 1, N);
    traj.pbar_vel = SpaceTimeField(tg.Nt + 1, N);
    traj.ptil = SpaceTimeField(tg.Nt + 1, N);
    traj.ptil_vel = SpaceTimeField(tg.Nt + 1, N);
    traj.wtil = SpaceTimeField(tg.Nt + 1, dom.plate_nodes());
    traj.wtil_vel = SpaceTimeField(tg.Nt + 1, dom.plate_nodes());
    const SpaceTimeField zg(tg.Nt + 1, dom.Nx), zh(tg.Nt + 1, dom.plate_nodes());
    CHECK(residual_APDE(params, zg, zh, prof, dom, traj, tests) == 0.0);
  }

  SUBCASE("solver trajectories annihilate the pairing against random tests") {
    const StateTrajectory traj = solve_forward(params, g, h, prof, dom, InitialData::zero(dom), tg);
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (double& v : tests.qbar.data) v = uni(rng);
    for (double& v : tests.qtil.data) v = uni(rng);
    for (double& v : tests.mu_N.data) v = uni(rng);
    for (double& v : tests.mu_pl.data) v = uni(rng);
    for (int n = 0; n <= tg.Nt; ++n)
      for (int i = 1; i < dom.plate_nodes() - 1; ++i) tests.vtil.at(n, i) = uni(rng);
    const double val = residual_APDE(params, g, h, prof, dom, traj, tests);
    CHECK(std::abs(val) < 1e-8);
  }
}

TEST_CASE("linearized solve") {
  const ReferenceDomain dom = make_domain(9, 3, 9);
  const TimeGrid tg{0.5, 8};
  const BoundaryProfile prof = clamped_bump(dom, 0.1);
  const SpaceTimeField g = smooth_g(dom, tg, 0.25);
  const SpaceTimeField h = smooth_h(dom, tg, 0.3);

  SUBCASE("zero right-hand side and directions give zero") {
    const PhysicalParams params = small_params(0.7);
    const StateTrajectory base = solve_forward(params, g, h, prof, dom, InitialData::zero(dom), tg);
    const SpaceTimeField zg(tg.Nt + 1, dom.Nx), zh(tg.Nt + 1, dom.plate_nodes());
    const StateTrajectory lin = solve_linearized(params, base, {}, zg, zh, Vec(), prof, dom, tg);
    for (double v : lin.ptil.data) CHECK(v == 0.0);
    for (double v : lin.pbar.data) CHECK(v == 0.0);
  }

  SUBCASE("at k = 0 the tangent map is the forward map") {
    const PhysicalParams params = small_params(0.0);
    const StateTrajectory base = solve_forward(params, g, h, prof, dom, InitialData::zero(dom), tg);
    const SpaceTimeField dg = smooth_g(dom, tg, 0.11);
    const SpaceTimeField dh = smooth_h(dom, tg, 0.07);
    const StateTrajectory lin = solve_linearized(params, base, {}, dg, dh, Vec(), prof, dom, tg);
    const StateTrajectory fwd = solve_forward(params, dg, dh, prof, dom, InitialData::zero(dom), tg);
    CHECK(trajectory_distance(lin, fwd, dom) < 1e-10);
  }

  SUBCASE("exact tangent of the discrete solution map (central difference probe)") {
    const PhysicalParams params = small_params(0.9);
    const StateTrajectory base = solve_forward(params, g, h, prof, dom, InitialData::zero(dom), tg);
    ControlTangent dir = ControlTangent::zeros(dom, tg.Nt);
    dir.g = smooth_g(dom, tg, 0.15);
    dir.h = smooth_h(dom, tg, 0.1);
    for (int i = 2; i < dom.Nx - 2; ++i)
      dir.ell[i] = 0.05 * std::pow(std::sin(M_PI * i / double(dom.Nx - 1)), 4);
    const StateTrajectory lin =
        solve_linearized(params, base, {}, dir.g, dir.h, dir.ell, prof, dom, tg);

    const double tau = 1e-5;
    BoundaryProfile prof_p = prof, prof_m = prof;
    SpaceTimeField gp = g, gm = g, hp = h, hm = h;
    for (size_t m = 0; m < gp.data.size(); ++m) {
      gp.data[m] += tau * dir.g.data[m];
      gm.data[m] -= tau * dir.g.data[m];
    }
    for (size_t m = 0; m < hp.data.size(); ++m) {
      hp.data[m] += tau * dir.h.data[m];
      hm.data[m] -= tau * dir.h.data[m];
    }
    for (size_t m = 0; m < prof_p.ell.size(); ++m) {
      prof_p.ell[m] += tau * dir.ell[m];
      prof_m.ell[m] -= tau * dir.ell[m];
    }
    const StateTrajectory sp = solve_forward(params, gp, hp, prof_p, dom, InitialData::zero(dom), tg);
    const StateTrajectory sm = solve_forward(params, gm, hm, prof_m, dom, InitialData::zero(dom), tg);
    StateTrajectory central = sp;
    for (size_t m = 0; m < central.pbar.data.size(); ++m) {
      central.pbar.data[m] = (sp.pbar.data[m] - sm.pbar.data[m]) / (2.0 * tau);
      central.pbar_vel.data[m] = (sp.pbar_vel.data[m] - sm.pbar_vel.data[m]) / (2.0 * tau);
      central.ptil.data[m] = (sp.ptil.data[m] - sm.ptil.data[m]) / (2.0 * tau);
      central.ptil_vel.data[m] = (sp.ptil_vel.data[m] - sm.ptil_vel.data[m]) / (2.0 * tau);
    }
    for (size_t m = 0; m < central.wtil.data.size(); ++m) {
      central.wtil.data[m] = (sp.wtil.data[m] - sm.wtil.data[m]) / (2.0 * tau);
      central.wtil_vel.data[m] = (sp.wtil_vel.data[m] - sm.wtil_vel.data[m]) / (2.0 * tau);
    }
    CHECK(trajectory_distance(lin, central, dom) < 5e-7);
  }

  SUBCASE("inhomogeneous right-hand sides are solvable with tiny residuals") {
    const PhysicalParams params = small_params(0.8);
    const StateTrajectory base = solve_forward(params, g, h, prof, dom, InitialData::zero(dom), tg);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    SpaceTimeField f_pbar(tg.Nt + 1, dom.num_nodes());
    SpaceTimeField f_ptil(tg.Nt + 1, dom.num_nodes());
    SpaceTimeField f_w(tg.Nt + 1, dom.plate_nodes());
    SpaceTimeField f_N(tg.Nt + 1, dom.Nx);
    SpaceTimeField f_pl(tg.Nt + 1, dom.plate_nodes());
    for (double& v : f_pbar.data) v = uni(rng);
    for (double& v : f_ptil.data) v = uni(rng);
    for (double& v : f_w.data) v = uni(rng);
    for (double& v : f_N.data) v = uni(rng);
    for (double& v : f_pl.data) v = uni(rng);
    LinearizedRhs rhs;
    rhs.f_pbar = &f_pbar;
    rhs.f_ptil = &f_ptil;
    rhs.f_w = &f_w;
    rhs.f_N = &f_N;
    rhs.f_pl = &f_pl;
    const SpaceTimeField zg(tg.Nt + 1, dom.Nx), zh(tg.Nt + 1, dom.plate_nodes());
    const StateTrajectory lin = solve_linearized(params, base, rhs, zg, zh, Vec(), prof, dom, tg);
    CHECK(lin.stats_ptil.max_linear_residual < 1e-8);
    double norm = 0.0;
    for (double v : lin.ptil.data) norm = std::max(norm, std::abs(v));
    CHECK(norm > 0.0);
  }
}

TEST_CASE("degeneracy guard fires for large data") {
  const ReferenceDomain dom = make_domain(9, 3, 9);
  const TimeGrid tg{0.5, 8};
  const PhysicalParams params = small_params(8.0);
  const SpaceTimeField g = smooth_g(dom, tg, 3.0);
  const SpaceTimeField h(tg.Nt + 1, dom.plate_nodes());
  CHECK_THROWS_AS(
      solve_forward(params, g, h, constant_profile(dom), dom, InitialData::zero(dom), tg), Error);
}
