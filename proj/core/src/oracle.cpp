// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/oracle.hpp"

#include <cmath>
#include <thread>

namespace aopt {

namespace {

ControlVector shifted(const ControlVector& u, double alpha, const ControlTangent& d) {
  ControlVector r = u;
  for (size_t m = 0; m < r.g.data.size(); ++m) r.g.data[m] += alpha * d.g.data[m];
  for (size_t m = 0; m < r.h.data.size(); ++m) r.h.data[m] += alpha * d.h.data[m];
  for (size_t m = 0; m < r.ell.ell.size(); ++m) r.ell.ell[m] += alpha * d.ell[m];
  return r;
}

/// Deterministic parallel map: results land in preassigned slots, exceptions
/// are re-thrown in index order.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t]() {
      for (int i = t; i < count; i += jobs) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (int i = 0; i < count; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace

double trajectory_distance(const StateTrajectory& a, const StateTrajectory& b,
                           const ReferenceDomain& dom) {
  check_shape(a.pbar.data.size() == b.pbar.data.size(), "trajectory_distance");
  const double dt = a.dt;
  double acc = 0.0;
  for (int n = 0; n <= a.Nt; ++n) {
    const double wt = (n == 0 || n == a.Nt) ? 0.5 * dt : dt;
    double lvl = 0.0;
    for (int i = 0; i < dom.Nx; ++i) {
      for (int j = 0; j < dom.nz(); ++j) {
        const int m = dom.idx(i, j);
        const double w = dom.wx(i) * dom.wz(j);
        const double d1 = a.pbar.at(n, m) - b.pbar.at(n, m);
        const double d2 = a.ptil.at(n, m) - b.ptil.at(n, m);
        const double d3 = a.pbar_vel.at(n, m) - b.pbar_vel.at(n, m);
        const double d4 = a.ptil_vel.at(n, m) - b.ptil_vel.at(n, m);
        lvl += w * (d1 * d1 + d2 * d2 + d3 * d3 + d4 * d4);
      }
    }
    for (int i = 0; i < dom.plate_nodes(); ++i) {
      const double w = dom.wx(i);
      const double d1 = a.wtil.at(n, i) - b.wtil.at(n, i);
      const double d2 = a.wtil_vel.at(n, i) - b.wtil_vel.at(n, i);
      lvl += w * (d1 * d1 + d2 * d2);
    }
    acc += wt * lvl;
  }
  return std::sqrt(acc);
}

FdOracleReport fd_gradient_oracle(const Problem& problem, const ControlVector& controls,
                                  const ControlTangent& direction, const Vec& taus, int jobs) {
  FdOracleReport rep;
  rep.taus = taus;
  rep.values.assign(taus.size(), 0.0);

  Vec j_plus(taus.size(), 0.0), j_minus(taus.size(), 0.0);
  parallel_for(static_cast<int>(2 * taus.size()), jobs, [&](int idx) {
    const int k = idx / 2;
    const double sign = (idx % 2 == 0) ? 1.0 : -1.0;
    const ControlVector u = shifted(controls, sign * taus[k], direction);
    const Evaluation ev = evaluate_reduced(problem, u);
    (sign > 0 ? j_plus : j_minus)[k] = ev.breakdown.total;
  });
  for (size_t k = 0; k < taus.size(); ++k) rep.values[k] = (j_plus[k] - j_minus[k]) / (2.0 * taus[k]);

  // plateau: the tau whose neighbor agrees best in relative terms
  double best = 1e300;
  for (size_t k = 0; k + 1 < taus.size(); ++k) {
    const double denom = std::max(std::abs(rep.values[k]), 1e-300);
    const double spread = std::abs(rep.values[k] - rep.values[k + 1]) / denom;
    if (spread < best) {
      best = spread;
      rep.plateau_value = rep.values[k + 1];
      rep.plateau_tau = taus[k + 1];
    }
  }
  rep.plateau_ok = best < 0.05;
  return rep;
}

double TaylorReport::slope_over(double tau_lo, double tau_hi) const {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (size_t k = 0; k < taus.size(); ++k) {
    if (taus[k] < tau_lo * (1.0 - 1e-12) || taus[k] > tau_hi * (1.0 + 1e-12)) continue;
    const double x = std::log(taus[k]);
    const double y = std::log(std::max(remainders[k], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return 0.0;
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

TaylorReport taylor_test(const Problem& problem, const ControlVector& controls,
                         const ControlTangent& direction, const Vec& taus, int jobs) {
  TaylorReport rep;
  rep.taus = taus;
  rep.remainders.assign(taus.size(), 0.0);

  const Evaluation base = evaluate_reduced(problem, controls);
  const StateTrajectory tangent =
      solve_linearized(problem.params, base.states, {}, direction.g, direction.h, direction.ell,
                       controls.ell, problem.dom, problem.tg);

  parallel_for(static_cast<int>(taus.size()), jobs, [&](int k) {
    const double tau = taus[k];
    const ControlVector u = shifted(controls, tau, direction);
    const Evaluation ev = evaluate_reduced(problem, u);
    // S(u + tau d) - S(u) - tau S'(u) d over the trajectory norm
    StateTrajectory predicted = base.states;
    for (size_t m = 0; m < predicted.pbar.data.size(); ++m) {
      predicted.pbar.data[m] += tau * tangent.pbar.data[m];
      predicted.pbar_vel.data[m] += tau * tangent.pbar_vel.data[m];
      predicted.ptil.data[m] += tau * tangent.ptil.data[m];
      predicted.ptil_vel.data[m] += tau * tangent.ptil_vel.data[m];
    }
    for (size_t m = 0; m < predicted.wtil.data.size(); ++m) {
      predicted.wtil.data[m] += tau * tangent.wtil.data[m];
      predicted.wtil_vel.data[m] += tau * tangent.wtil_vel.data[m];
    }
    rep.remainders[k] = trajectory_distance(ev.states, predicted, problem.dom);
  });
  rep.slope = rep.slope_over(0.0, 1e300);
  return rep;
}

}  // namespace aopt
