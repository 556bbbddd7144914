// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/energy.hpp"

#include <cmath>

#include "aopt/fractional.hpp"
#include "aopt/operators.hpp"

namespace aopt {

namespace {

/// Mapped-gradient squared norm of one level: |M grad_ref f|^2 against the
/// physical volume density.
double h1_seminorm_sq(const Vec& f, const MappedCoefficients& coeffs) {
  const ReferenceDomain& dom = coeffs.dom;
  double acc = 0.0;
  for (int i = 0; i < dom.Nx; ++i) {
    for (int j = 0; j < dom.nz(); ++j) {
      const int n = dom.idx(i, j);
      double fx;
      if (i == 0)
        fx = (-3.0 * f[dom.idx(0, j)] + 4.0 * f[dom.idx(1, j)] - f[dom.idx(2, j)]) / (2.0 * dom.dx());
      else if (i == dom.Nx - 1)
        fx = (3.0 * f[n] - 4.0 * f[dom.idx(i - 1, j)] + f[dom.idx(i - 2, j)]) / (2.0 * dom.dx());
      else
        fx = (f[dom.idx(i + 1, j)] - f[dom.idx(i - 1, j)]) / (2.0 * dom.dx());
      double fz;
      const double dzb = dom.dz_below(std::max(j, 1));
      const double dza = dom.dz_above(std::min(j, dom.nz() - 2));
      if (j == 0)
        fz = (-3.0 * f[n] + 4.0 * f[dom.idx(i, 1)] - f[dom.idx(i, 2)]) / (2.0 * dza);
      else if (j == dom.nz() - 1)
        fz = (3.0 * f[n] - 4.0 * f[dom.idx(i, j - 1)] + f[dom.idx(i, j - 2)]) / (2.0 * dzb);
      else
        fz = (f[dom.idx(i, j + 1)] - f[dom.idx(i, j - 1)]) / (dzb + dza);
      const double gx = fx + coeffs.m12[n] * fz;
      const double gz = coeffs.m22[n] * fz;
      acc += dom.wx(i) * dom.wz(j) * coeffs.vol_density[n] * (gx * gx + gz * gz);
    }
  }
  return acc;
}

double l2_sq(const Vec& f, const MappedCoefficients& coeffs) {
  const ReferenceDomain& dom = coeffs.dom;
  double acc = 0.0;
  for (int i = 0; i < dom.Nx; ++i)
    for (int j = 0; j < dom.nz(); ++j) {
      const int n = dom.idx(i, j);
      acc += dom.wx(i) * dom.wz(j) * coeffs.vol_density[n] * f[n] * f[n];
    }
  return acc;
}

double lap_sq(const Vec& d2f, const MappedCoefficients& coeffs) {
  const ReferenceDomain& dom = coeffs.dom;
  double acc = 0.0;
  for (int i = 1; i < dom.Nx - 1; ++i)
    for (int j = 1; j < dom.nz() - 1; ++j) {
      const int n = dom.idx(i, j);
      acc += dom.wx(i) * dom.wz(j) * coeffs.vol_density[n] * d2f[n] * d2f[n];
    }
  return acc;
}

double side_sq(const Vec& f, const ReferenceDomain& dom) {
  double acc = 0.0;
  for (int side = 0; side < 2; ++side) {
    const int i = side == 0 ? 0 : dom.Nx - 1;
    for (int j = 0; j < dom.nz(); ++j) acc += dom.wz(j) * f[dom.idx(i, j)] * f[dom.idx(i, j)];
  }
  return acc;
}

Vec level_vec(const SpaceTimeField& f, int n) { return Vec(f.level(n).begin(), f.level(n).end()); }

}  // namespace

std::vector<EnergyRecord> energy_series(const StateTrajectory& states, const PhysicalParams& params,
                                        const BoundaryProfile& profile, const ReferenceDomain& dom) {
  const int Nt = states.Nt;
  const double dt = states.dt;
  const MappedCoefficients coeffs = transform_coefficients(profile, dom);
  const SparseOperator d2 = assemble_mapped_d2(coeffs);

  const SpaceTimeField pbar_t = fd_time_derivative(states.pbar, dt);
  const SpaceTimeField pbar_tt = fd_time_second_derivative(states.pbar, dt);
  const SpaceTimeField ptil_t = fd_time_derivative(states.ptil, dt);
  const SpaceTimeField ptil_tt = fd_time_second_derivative(states.ptil, dt);
  const SpaceTimeField w_tt = fd_time_derivative(states.wtil_vel, dt);

  std::vector<EnergyRecord> out(Nt + 1);
  double hist_pbar_tt = 0.0, hist_pbar_lapt = 0.0, hist_pbar_bnd = 0.0;
  double hist_ptil_tt = 0.0, hist_ptil_lapt = 0.0, hist_ptil_bnd = 0.0;
  double prev_pbar_tt = 0.0, prev_pbar_lapt = 0.0, prev_pbar_bnd = 0.0;
  double prev_ptil_tt = 0.0, prev_ptil_lapt = 0.0, prev_ptil_bnd = 0.0;

  for (int n = 0; n <= Nt; ++n) {
    EnergyRecord& r = out[n];
    r.t = n * dt;

    const Vec pb_t = level_vec(pbar_t, n);
    const Vec pb_tt = level_vec(pbar_tt, n);
    const Vec pt_t = level_vec(ptil_t, n);
    const Vec pt_tt = level_vec(ptil_tt, n);
    const Vec pb = level_vec(states.pbar, n);
    const Vec pt = level_vec(states.ptil, n);

    const double cur_pbar_tt = l2_sq(pb_tt, coeffs);
    const double cur_ptil_tt = l2_sq(pt_tt, coeffs);
    const Vec d2_pb = d2.apply(pb);
    const Vec d2_pt = d2.apply(pt);
    const Vec d2_pb_t = d2.apply(pb_t);
    const Vec d2_pt_t = d2.apply(pt_t);
    const double cur_pbar_lapt = lap_sq(d2_pb_t, coeffs);
    const double cur_ptil_lapt = lap_sq(d2_pt_t, coeffs);
    const double cur_pbar_bnd = side_sq(pb_tt, dom);
    const double cur_ptil_bnd = side_sq(pt_tt, dom);
    if (n > 0) {
      hist_pbar_tt += 0.5 * dt * (prev_pbar_tt + cur_pbar_tt);
      hist_ptil_tt += 0.5 * dt * (prev_ptil_tt + cur_ptil_tt);
      hist_pbar_lapt += 0.5 * dt * (prev_pbar_lapt + cur_pbar_lapt);
      hist_ptil_lapt += 0.5 * dt * (prev_ptil_lapt + cur_ptil_lapt);
      hist_pbar_bnd += 0.5 * dt * (prev_pbar_bnd + cur_pbar_bnd);
      hist_ptil_bnd += 0.5 * dt * (prev_ptil_bnd + cur_ptil_bnd);
    }
    prev_pbar_tt = cur_pbar_tt;
    prev_ptil_tt = cur_ptil_tt;
    prev_pbar_lapt = cur_pbar_lapt;
    prev_ptil_lapt = cur_ptil_lapt;
    prev_pbar_bnd = cur_pbar_bnd;
    prev_ptil_bnd = cur_ptil_bnd;

    r.pbar_tt_hist = hist_pbar_tt;
    r.ptil_tt_hist = hist_ptil_tt;
    r.pbar_t_h1 = l2_sq(pb_t, coeffs) + h1_seminorm_sq(pb_t, coeffs);
    r.ptil_t_h1 = l2_sq(pt_t, coeffs) + h1_seminorm_sq(pt_t, coeffs);
    r.pbar_lap = lap_sq(d2_pb, coeffs);
    r.ptil_lap = lap_sq(d2_pt, coeffs);
    r.pbar_lap_t_hist = params.b * hist_pbar_lapt;
    r.ptil_lap_t_hist = params.b * hist_ptil_lapt;
    r.pbar_bnd_hist = params.beta_a * hist_pbar_bnd;
    r.ptil_bnd_hist = params.beta_a * hist_ptil_bnd;
    r.pbar_bnd = 0.5 * params.gamma_a * side_sq(pb_t, dom);
    r.ptil_bnd = 0.5 * params.gamma_a * side_sq(pt_t, dom);

    // plate rate field
    double wr = 0.0, wl = 0.0;
    for (int i = 0; i < dom.plate_nodes(); ++i) wr += dom.wx(i) * w_tt.at(n, i) * w_tt.at(n, i);
    const double dx2 = dom.dx() * dom.dx();
    for (int i = 1; i < dom.plate_nodes() - 1; ++i) {
      const double lap = (states.wtil_vel.at(n, i - 1) - 2.0 * states.wtil_vel.at(n, i) +
                          states.wtil_vel.at(n, i + 1)) /
                         dx2;
      wl += dom.wx(i) * lap * lap;
    }
    r.w_rate = wr;
    r.w_lap = wl;

    r.total = r.pbar_tt_hist + r.pbar_t_h1 + r.pbar_lap + r.pbar_lap_t_hist + r.pbar_bnd_hist +
              r.pbar_bnd + r.ptil_tt_hist + r.ptil_t_h1 + r.ptil_lap + r.ptil_lap_t_hist +
              r.ptil_bnd_hist + r.ptil_bnd + r.w_rate + r.w_lap;
  }
  return out;
}

double data_norm_sq(const SpaceTimeField& g, const SpaceTimeField& h, const BoundaryProfile& profile,
                    const ReferenceDomain& dom, const TimeGrid& tg, double s_g) {
  const int Nt = tg.Nt;
  const double dt = tg.dt();
  const MappedCoefficients coeffs = transform_coefficients(profile, dom);
  const NeumannSpectrum spec(dom.Nx, dom.Lx);
  const SpaceTimeField g_t = fd_time_derivative(g, dt);
  const SpaceTimeField g_tt = fd_time_second_derivative(g, dt);
  const SpaceTimeField h_t = fd_time_derivative(h, dt);

  double acc = 0.0;
  double h_l1 = 0.0;
  for (int n = 0; n <= Nt; ++n) {
    const double wt = (n == 0 || n == Nt) ? 0.5 * dt : dt;
    Vec row(dom.Nx);
    for (int i = 0; i < dom.Nx; ++i) row[i] = g.at(n, i);
    const Vec half = spec.apply(row, 0.5 * s_g);
    double hs = 0.0;
    for (int i = 0; i < dom.Nx; ++i) hs += dom.wx(i) * coeffs.omega1[i] * half[i] * half[i];
    acc += wt * hs;
    double gt2 = 0.0, gtt2 = 0.0;
    for (int i = 0; i < dom.Nx; ++i) {
      gt2 += dom.wx(i) * coeffs.omega1[i] * g_t.at(n, i) * g_t.at(n, i);
      gtt2 += dom.wx(i) * coeffs.omega1[i] * g_tt.at(n, i) * g_tt.at(n, i);
    }
    acc += wt * (gt2 + gtt2);
    double hnorm = 0.0;
    for (int i = 0; i < dom.plate_nodes(); ++i) hnorm += dom.wx(i) * h_t.at(n, i) * h_t.at(n, i);
    h_l1 += wt * std::sqrt(hnorm);
  }
  return acc + h_l1 * h_l1;
}

EnergyIdentityReport pbar_energy_identity(const StateTrajectory& states, const PhysicalParams& params,
                                          const SpaceTimeField& g, const BoundaryProfile& profile,
                                          const ReferenceDomain& dom) {
  const int Nt = states.Nt;
  const double dt = states.dt;
  const MappedCoefficients coeffs = transform_coefficients(profile, dom);
  const SparseOperator d2 = assemble_mapped_d2(coeffs);
  const SpaceTimeField pbar_t = fd_time_derivative(states.pbar, dt);
  const SpaceTimeField pbar_tt = fd_time_second_derivative(states.pbar, dt);
  const SpaceTimeField g_t = fd_time_derivative(g, dt);
  const int J = dom.nz() - 1;
  const double c2 = params.c * params.c;

  double hist_lapt = 0.0, hist_bnd = 0.0, rhs = 0.0;
  double prev_lapt = 0.0, prev_bnd = 0.0, prev_work = 0.0;
  EnergyIdentityReport rep;
  for (int n = 0; n <= Nt; ++n) {
    const Vec pb_t = level_vec(pbar_t, n);
    const Vec pb_tt = level_vec(pbar_tt, n);
    const Vec d2_pb_t = d2.apply(pb_t);
    const double cur_lapt = lap_sq(d2_pb_t, coeffs);
    const double cur_bnd = side_sq(pb_tt, dom);
    double cur_work = 0.0;
    for (int i = 1; i < dom.Nx - 1; ++i)
      cur_work += dom.wx(i) * coeffs.omega1[i] * pb_tt[dom.idx(i, J)] * g_t.at(n, i);
    if (n > 0) {
      hist_lapt += 0.5 * dt * (prev_lapt + cur_lapt);
      hist_bnd += 0.5 * dt * (prev_bnd + cur_bnd);
      rhs += 0.5 * dt * (prev_work + cur_work);
    }
    prev_lapt = cur_lapt;
    prev_bnd = cur_bnd;
    prev_work = cur_work;
  }

  const Vec pb_T = level_vec(states.pbar, Nt);
  const Vec pb_t_T = level_vec(pbar_t, Nt);
  const Vec d2_pb_T = d2.apply(pb_T);
  rep.lhs = 0.5 * h1_seminorm_sq(pb_t_T, coeffs) + 0.5 * c2 * lap_sq(d2_pb_T, coeffs) +
            params.b * hist_lapt + params.beta_a * hist_bnd +
            0.5 * params.gamma_a * side_sq(pb_t_T, dom);
  rep.rhs = rhs;
  rep.defect = std::abs(rep.lhs - rep.rhs) / std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1e-300});
  return rep;
}

}  // namespace aopt
