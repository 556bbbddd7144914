// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "aopt/objective.hpp"

namespace aopt {

/// Everything that defines the reduced optimization problem.
struct Problem {
  ReferenceDomain dom;
  PhysicalParams params;
  TimeGrid tg;
  InitialData init;
  Targets targets;
  RegConfig reg;
};

/// Tangent triple of the control space (first control layers and profile
/// ends already projected out where applicable).
struct ControlTangent {
  SpaceTimeField g, h;
  Vec ell;

  static ControlTangent zeros(const ReferenceDomain& dom, int Nt);
};

double tangent_inner(const ControlTangent& a, const ControlTangent& b, const ReferenceDomain& dom,
                     const TimeGrid& tg);

struct Evaluation {
  StateTrajectory states;
  ObjectiveBreakdown breakdown;
};

/// Forward solve plus objective; never touches the adjoint.
Evaluation evaluate_reduced(const Problem& problem, const ControlVector& controls);

/// Adjoint solve plus the three gradients, as a tangent triple.
ControlTangent reduced_gradient(const Problem& problem, const ControlVector& controls,
                                const StateTrajectory& states);

struct OptimizerConfig {
  int max_iters = 100;
  double armijo_c1 = 1e-4;
  double step_init = 1.0;
  double step_shrink = 0.5;
  double grad_tol = -1.0;  // < 0: use 1e-6 (1 + J(initial))
  enum class Mode { GD, LBFGS } mode = Mode::LBFGS;
  int lbfgs_memory = 5;
  bool smooth_riesz = false;
};

struct IterateRecord {
  int iter = 0;
  ObjectiveBreakdown breakdown;
  double grad_norm_g = 0.0, grad_norm_h = 0.0, grad_norm_ell = 0.0, grad_norm = 0.0;
  double step = 0.0;
  int ls_trials = 0;
  bool feasible = true;
  double nondegeneracy_margin = 1.0;
};
using IterateHistory = std::vector<IterateRecord>;

/// Projection onto the admissible affine space: zeroes the first two time
/// layers of g - g0 and the first layer of h - h0, clamps the profile ends
/// (values and one-sided slopes), and rescales the profile offset to the
/// closeness bound when it exceeds it. Idempotent.
ControlVector project_admissible(const ControlVector& raw, const ReferenceDomain& dom);

struct OptimizeResult {
  ControlVector controls;
  IterateHistory history;
  bool converged = false;
};

using CheckpointFn = std::function<void(int iter, const ControlVector&, const IterateRecord&)>;

/// Projected descent with Armijo backtracking; infeasible or degenerate
/// trial points count as failed trials. Accepted-iterate objective values
/// are non-increasing.
OptimizeResult optimize(const OptimizerConfig& cfg, const Problem& problem,
                        const ControlVector& start, const CheckpointFn& checkpoint = nullptr);

}  // namespace aopt
