// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/objective.hpp"

#include <cmath>

namespace aopt {

namespace {
double time_weight(int n, int Nt, double dt) { return (n == 0 || n == Nt) ? 0.5 * dt : dt; }
}  // namespace

ControlVector ControlVector::zeros(const ReferenceDomain& dom, int Nt) {
  ControlVector u;
  u.g = SpaceTimeField(Nt + 1, dom.Nx);
  u.h = SpaceTimeField(Nt + 1, dom.plate_nodes());
  u.ell = constant_profile(dom);
  u.g0 = SpaceTimeField(Nt + 1, dom.Nx);
  u.h0 = SpaceTimeField(Nt + 1, dom.plate_nodes());
  u.ell0 = constant_profile(dom);
  return u;
}

Vec roi_mask_rectangle(const ReferenceDomain& dom, double x0, double x1, double z0, double z1) {
  Vec mask(dom.num_nodes(), 0.0);
  const double tol = 1e-12 * std::max(1.0, dom.Lx);
  for (int i = 0; i < dom.Nx; ++i) {
    for (int j = 0; j < dom.nz(); ++j) {
      const double x = dom.x(i);
      const double z = dom.zhat(j);
      if (x >= x0 - tol && x <= x1 + tol && z >= z0 - tol && z <= z1 + tol)
        mask[dom.idx(i, j)] = 1.0;
    }
  }
  return mask;
}

ObjectiveBreakdown eval_objective(const ControlVector& controls, const StateTrajectory& states,
                                  const Targets& targets, const RegConfig& reg,
                                  const ReferenceDomain& dom, const TimeGrid& tg) {
  const int N = dom.num_nodes();
  const int Npl = dom.plate_nodes();
  const int Nt = tg.Nt;
  const double dt = tg.dt();
  check_shape(states.ptil.n == N && targets.p_d.n == N, "eval_objective: state/target shape");
  check_shape(controls.g.levels == Nt + 1 && controls.h.levels == Nt + 1, "eval_objective: controls");

  const MappedCoefficients coeffs = transform_coefficients(controls.ell, dom);

  ObjectiveBreakdown out;
  out.theta = reg.theta;

  for (int n = 0; n <= Nt; ++n) {
    const double wt = time_weight(n, Nt, dt);
    double acc_p = 0.0;
    for (int i = 0; i < dom.Nx; ++i) {
      for (int j = 0; j < dom.nz(); ++j) {
        const int m = dom.idx(i, j);
        if (targets.roi_mask[m] == 0.0) continue;
        const double mis = states.pbar.at(n, m) + states.ptil.at(n, m) - targets.p_d.at(n, m);
        acc_p += dom.wx(i) * dom.wz(j) * coeffs.vol_density[m] * mis * mis;
      }
    }
    out.tracking_p += 0.5 * wt * acc_p;
    double acc_w = 0.0;
    for (int i = 0; i < Npl; ++i) {
      const double mis = states.wtil.at(n, i) - targets.w_d.at(n, i);
      acc_w += dom.wx(i) * mis * mis;
    }
    out.tracking_w += 0.5 * wt * acc_w;
  }

  // time-difference regularizers
  const double dt2 = dt * dt;
  for (int n = 1; n < Nt; ++n) {
    double acc = 0.0;
    for (int i = 0; i < dom.Nx; ++i) {
      const double d2 = (controls.g.at(n - 1, i) - controls.g0.at(n - 1, i) -
                         2.0 * (controls.g.at(n, i) - controls.g0.at(n, i)) +
                         controls.g.at(n + 1, i) - controls.g0.at(n + 1, i)) /
                        dt2;
      acc += dom.wx(i) * d2 * d2;
    }
    out.reg_g_time += dt * acc;
  }
  for (int n = 0; n < Nt; ++n) {
    double acc = 0.0;
    for (int i = 0; i < Npl; ++i) {
      const double d1 = (controls.h.at(n + 1, i) - controls.h0.at(n + 1, i) -
                         (controls.h.at(n, i) - controls.h0.at(n, i))) /
                        dt;
      acc += dom.wx(i) * d1 * d1;
    }
    out.reg_h += dt * acc;
  }

  // spatial smoothing regularizers through the cosine spectrum
  const NeumannSpectrum spec_g(dom.Nx, dom.Lx);
  for (int n = 0; n <= Nt; ++n) {
    Vec row(dom.Nx);
    for (int i = 0; i < dom.Nx; ++i) row[i] = controls.g.at(n, i) - controls.g0.at(n, i);
    const Vec ag = spec_g.apply(row, reg.s_g);
    double acc = 0.0;
    for (int i = 0; i < dom.Nx; ++i) acc += dom.wx(i) * ag[i] * ag[i];
    out.reg_g_space += time_weight(n, Nt, dt) * acc;
  }
  {
    const NeumannSpectrum spec_ell(dom.Nx, dom.Lx);
    Vec diff(dom.Nx);
    for (int i = 0; i < dom.Nx; ++i) diff[i] = controls.ell.ell[i] - controls.ell0.ell[i];
    const Vec al = spec_ell.apply(diff, 0.5 * reg.s_ell);
    for (int i = 0; i < dom.Nx; ++i) out.reg_ell += dom.wx(i) * al[i] * al[i];
  }

  out.total = out.tracking_p + out.tracking_w +
              0.5 * reg.theta * (out.reg_g_time + out.reg_g_space + out.reg_h + out.reg_ell);
  return out;
}

std::pair<double, double> agmon_check(const ControlVector& controls, const RegConfig& reg,
                                      const ReferenceDomain& dom, const TimeGrid& tg) {
  const int Nt = tg.Nt;
  const double dt = tg.dt();
  const NeumannSpectrum spec(dom.Nx, dom.Lx);

  // midpoint time derivatives of g - g0
  std::vector<Vec> u(Nt, Vec(dom.Nx, 0.0));
  for (int n = 0; n < Nt; ++n)
    for (int i = 0; i < dom.Nx; ++i)
      u[n][i] = (controls.g.at(n + 1, i) - controls.g0.at(n + 1, i) - controls.g.at(n, i) +
                 controls.g0.at(n, i)) /
                dt;

  double lhs = 0.0;
  for (int n = 0; n < Nt; ++n) lhs = std::max(lhs, spec.hs_norm_sq(u[n], reg.s_g));

  double rhs = spec.hs_norm_sq(u[0], reg.s_g);
  for (int n = 1; n < Nt; ++n) {
    Vec avg(dom.Nx), quot(dom.Nx);
    for (int i = 0; i < dom.Nx; ++i) {
      avg[i] = 0.5 * (u[n][i] + u[n - 1][i]);
      quot[i] = (u[n][i] - u[n - 1][i]) / dt;
    }
    const Vec a_avg = spec.apply(avg, reg.s_g);
    double t1 = 0.0, t2 = 0.0;
    for (int i = 0; i < dom.Nx; ++i) {
      t1 += dom.wx(i) * a_avg[i] * a_avg[i];
      t2 += dom.wx(i) * quot[i] * quot[i];
    }
    rhs += dt * (t1 + t2);
  }
  return {lhs, rhs};
}

double control_inner_g(const SpaceTimeField& a, const SpaceTimeField& b, const ReferenceDomain& dom,
                       const TimeGrid& tg) {
  check_shape(a.levels == b.levels && a.n == b.n, "control_inner_g");
  double acc = 0.0;
  for (int n = 0; n <= tg.Nt; ++n) {
    const double wt = time_weight(n, tg.Nt, tg.dt());
    for (int i = 0; i < dom.Nx; ++i) acc += wt * dom.wx(i) * a.at(n, i) * b.at(n, i);
  }
  return acc;
}

double control_inner_h(const SpaceTimeField& a, const SpaceTimeField& b, const ReferenceDomain& dom,
                       const TimeGrid& tg) {
  check_shape(a.levels == b.levels && a.n == b.n, "control_inner_h");
  double acc = 0.0;
  for (int n = 0; n <= tg.Nt; ++n) {
    const double wt = time_weight(n, tg.Nt, tg.dt());
    for (int i = 0; i < dom.plate_nodes(); ++i) acc += wt * dom.wx(i) * a.at(n, i) * b.at(n, i);
  }
  return acc;
}

double control_inner_ell(const Vec& a, const Vec& b, const ReferenceDomain& dom) {
  check_shape(a.size() == b.size(), "control_inner_ell");
  double acc = 0.0;
  for (int i = 0; i < dom.Nx; ++i) acc += dom.wx(i) * a[i] * b[i];
  return acc;
}

}  // namespace aopt
