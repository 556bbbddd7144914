// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/optimizer.hpp"

#include <cmath>
#include <deque>

namespace aopt {

ControlTangent ControlTangent::zeros(const ReferenceDomain& dom, int Nt) {
  ControlTangent t;
  t.g = SpaceTimeField(Nt + 1, dom.Nx);
  t.h = SpaceTimeField(Nt + 1, dom.plate_nodes());
  t.ell.assign(dom.Nx, 0.0);
  return t;
}

double tangent_inner(const ControlTangent& a, const ControlTangent& b, const ReferenceDomain& dom,
                     const TimeGrid& tg) {
  return control_inner_g(a.g, b.g, dom, tg) + control_inner_h(a.h, b.h, dom, tg) +
         control_inner_ell(a.ell, b.ell, dom);
}

namespace {

ControlTangent axpy(const ControlTangent& x, double alpha, const ControlTangent& y) {
  ControlTangent r = x;
  for (size_t m = 0; m < r.g.data.size(); ++m) r.g.data[m] += alpha * y.g.data[m];
  for (size_t m = 0; m < r.h.data.size(); ++m) r.h.data[m] += alpha * y.h.data[m];
  for (size_t m = 0; m < r.ell.size(); ++m) r.ell[m] += alpha * y.ell[m];
  return r;
}

ControlTangent scaled(const ControlTangent& x, double alpha) {
  ControlTangent r = x;
  for (double& v : r.g.data) v *= alpha;
  for (double& v : r.h.data) v *= alpha;
  for (double& v : r.ell) v *= alpha;
  return r;
}

ControlVector shifted(const ControlVector& u, double alpha, const ControlTangent& d) {
  ControlVector r = u;
  for (size_t m = 0; m < r.g.data.size(); ++m) r.g.data[m] += alpha * d.g.data[m];
  for (size_t m = 0; m < r.h.data.size(); ++m) r.h.data[m] += alpha * d.h.data[m];
  for (size_t m = 0; m < r.ell.ell.size(); ++m) r.ell.ell[m] += alpha * d.ell[m];
  return r;
}

ControlTangent difference(const ControlVector& a, const ControlVector& b) {
  ControlTangent d;
  d.g = a.g;
  for (size_t m = 0; m < d.g.data.size(); ++m) d.g.data[m] -= b.g.data[m];
  d.h = a.h;
  for (size_t m = 0; m < d.h.data.size(); ++m) d.h.data[m] -= b.h.data[m];
  d.ell = a.ell.ell;
  for (size_t m = 0; m < d.ell.size(); ++m) d.ell[m] -= b.ell.ell[m];
  return d;
}

}  // namespace

Evaluation evaluate_reduced(const Problem& problem, const ControlVector& controls) {
  Evaluation ev;
  ev.states = solve_forward(problem.params, controls.g, controls.h, controls.ell, problem.dom,
                            problem.init, problem.tg);
  ev.breakdown =
      eval_objective(controls, ev.states, problem.targets, problem.reg, problem.dom, problem.tg);
  return ev;
}

ControlTangent reduced_gradient(const Problem& problem, const ControlVector& controls,
                                const StateTrajectory& states) {
  AdjointTrajectory adj =
      solve_adjoint(problem.params, states, problem.targets, controls.ell, problem.dom);
  extract_multipliers(adj, problem.params, controls.ell);
  ControlTangent grad;
  grad.g = gradient_g(controls, adj.mu_N, problem.reg, problem.dom, problem.tg);
  grad.h = gradient_h(controls, adj.vtil, problem.params, problem.reg, problem.dom, problem.tg);
  grad.ell = gradient_ell(controls, states, adj, problem.targets, problem.params, problem.reg,
                          problem.dom, problem.tg);
  return grad;
}

ControlVector project_admissible(const ControlVector& raw, const ReferenceDomain& dom) {
  ControlVector u = raw;
  for (int i = 0; i < u.g.n; ++i) {
    u.g.at(0, i) = u.g0.at(0, i);
    u.g.at(1, i) = u.g0.at(1, i);
  }
  for (int i = 0; i < u.h.n; ++i) u.h.at(0, i) = u.h0.at(0, i);

  const int n = dom.Nx;
  Vec offset(n);
  double min_ell0 = u.ell0.ell[0];
  for (int i = 0; i < n; ++i) min_ell0 = std::min(min_ell0, u.ell0.ell[i]);
  for (int i = 0; i < n; ++i) offset[i] = u.ell.ell[i] - u.ell0.ell[i];
  offset[0] = offset[1] = offset[n - 2] = offset[n - 1] = 0.0;
  double dev = 0.0;
  for (int i = 0; i < n; ++i) dev = std::max(dev, std::abs(offset[i]));
  const double bound = 0.5 * min_ell0;
  if (dev > bound) {
    const double s = bound / dev;
    for (int i = 0; i < n; ++i) offset[i] *= s;
  }
  for (int i = 0; i < n; ++i) u.ell.ell[i] = u.ell0.ell[i] + offset[i];
  u.ell.ell0_ref = u.ell0.ell0_ref;
  return u;
}

OptimizeResult optimize(const OptimizerConfig& cfg, const Problem& problem,
                        const ControlVector& start, const CheckpointFn& checkpoint) {
  if (!(cfg.armijo_c1 > 0.0 && cfg.armijo_c1 < 1.0))
    fail(ErrorKind::ConfigInvalid, "armijo_c1 must lie in (0, 1)");
  const ReferenceDomain& dom = problem.dom;
  const TimeGrid& tg = problem.tg;

  OptimizeResult res;
  ControlVector u = project_admissible(start, dom);
  Evaluation ev = evaluate_reduced(problem, u);

  double grad_tol = cfg.grad_tol;
  if (grad_tol < 0.0) grad_tol = 1e-6 * (1.0 + ev.breakdown.total);

  struct Pair {
    ControlTangent s, y;
    double rho;
  };
  std::deque<Pair> memory;
  ControlTangent prev_grad;
  ControlVector prev_u = u;
  bool have_prev = false;

  const NeumannSpectrum spec(dom.Nx, dom.Lx);

  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    ControlTangent grad = reduced_gradient(problem, u, ev.states);

    if (have_prev) {
      Pair pr;
      pr.s = difference(u, prev_u);
      pr.y = grad;
      for (size_t m = 0; m < pr.y.g.data.size(); ++m) pr.y.g.data[m] -= prev_grad.g.data[m];
      for (size_t m = 0; m < pr.y.h.data.size(); ++m) pr.y.h.data[m] -= prev_grad.h.data[m];
      for (size_t m = 0; m < pr.y.ell.size(); ++m) pr.y.ell[m] -= prev_grad.ell[m];
      const double sy = tangent_inner(pr.s, pr.y, dom, tg);
      const double ss = tangent_inner(pr.s, pr.s, dom, tg);
      const double yy = tangent_inner(pr.y, pr.y, dom, tg);
      if (sy > 1e-12 * std::sqrt(ss * yy) && sy > 0.0) {
        pr.rho = 1.0 / sy;
        memory.push_back(std::move(pr));
        while (static_cast<int>(memory.size()) > cfg.lbfgs_memory) memory.pop_front();
      }
    }

    IterateRecord rec;
    rec.iter = iter;
    rec.breakdown = ev.breakdown;
    rec.grad_norm_g = std::sqrt(std::max(0.0, control_inner_g(grad.g, grad.g, dom, tg)));
    rec.grad_norm_h = std::sqrt(std::max(0.0, control_inner_h(grad.h, grad.h, dom, tg)));
    rec.grad_norm_ell = std::sqrt(std::max(0.0, control_inner_ell(grad.ell, grad.ell, dom)));
    rec.grad_norm = std::sqrt(rec.grad_norm_g * rec.grad_norm_g + rec.grad_norm_h * rec.grad_norm_h +
                              rec.grad_norm_ell * rec.grad_norm_ell);
    rec.nondegeneracy_margin = ev.states.nondegeneracy_margin;

    if (rec.grad_norm < grad_tol || iter == cfg.max_iters) {
      res.history.push_back(rec);
      if (checkpoint) checkpoint(iter, u, rec);
      res.converged = rec.grad_norm < grad_tol;
      break;
    }

    // descent direction
    ControlTangent dir = scaled(grad, -1.0);
    if (cfg.mode == OptimizerConfig::Mode::LBFGS && !memory.empty()) {
      ControlTangent q = grad;
      std::vector<double> alpha(memory.size());
      for (int m = static_cast<int>(memory.size()) - 1; m >= 0; --m) {
        alpha[m] = memory[m].rho * tangent_inner(memory[m].s, q, dom, tg);
        q = axpy(q, -alpha[m], memory[m].y);
      }
      const double yy = tangent_inner(memory.back().y, memory.back().y, dom, tg);
      const double gamma = yy > 0.0 ? 1.0 / (memory.back().rho * yy) : 1.0;
      ControlTangent r = scaled(q, gamma);
      for (size_t m = 0; m < memory.size(); ++m) {
        const double beta = memory[m].rho * tangent_inner(memory[m].y, r, dom, tg);
        r = axpy(r, alpha[m] - beta, memory[m].s);
      }
      dir = scaled(r, -1.0);
    }
    if (cfg.smooth_riesz) {
      for (int n = 0; n <= tg.Nt; ++n) {
        Vec row(dom.Nx);
        for (int i = 0; i < dom.Nx; ++i) row[i] = dir.g.at(n, i);
        const Vec sm = spec.apply(row, -2.0 * problem.reg.s_g);
        for (int i = 0; i < dom.Nx; ++i) dir.g.at(n, i) = sm[i];
      }
      dir.ell = spec.apply(dir.ell, -problem.reg.s_ell);
    }

    // Armijo backtracking on the projected step
    double step = cfg.step_init;
    bool accepted = false;
    int trials = 0;
    ControlVector trial_u;
    Evaluation trial_ev;
    double pred = 0.0;
    while (trials < 20) {
      ++trials;
      trial_u = project_admissible(shifted(u, step, dir), dom);
      const AdmissibilityReport rep = validate_profile(trial_u.ell, dom);
      bool ok = rep.admissible();
      if (ok) {
        try {
          trial_ev = evaluate_reduced(problem, trial_u);
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::NonDegeneracyViolated || e.kind() == ErrorKind::NewtonDiverged ||
              e.kind() == ErrorKind::InadmissibleProfile)
            ok = false;
          else
            throw;
        }
      }
      if (ok) {
        const ControlTangent actual = difference(u, trial_u);
        pred = tangent_inner(grad, actual, dom, tg);
        if (pred > 0.0 && ev.breakdown.total - trial_ev.breakdown.total >= cfg.armijo_c1 * pred) {
          accepted = true;
          break;
        }
      }
      step *= cfg.step_shrink;
    }
    if (!accepted) fail(ErrorKind::LineSearchStalled, "no acceptable step after 20 trials");

    rec.step = step;
    rec.ls_trials = trials;
    res.history.push_back(rec);
    if (checkpoint) checkpoint(iter, u, rec);

    prev_u = u;
    prev_grad = grad;
    have_prev = true;
    u = trial_u;
    ev = trial_ev;
  }

  res.controls = u;
  return res;
}

}  // namespace aopt
