// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Shared trapezoidal-step machinery for the forward, linearized and adjoint
// marches. Internal to the library.

#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <span>

#include "aopt/forward.hpp"

namespace aopt::detail {

struct Row {
  std::vector<std::pair<int, double>> e;
  void add(int n, double v) { e.emplace_back(n, v); }
  double dot(std::span<const double> x) const {
    double acc = 0.0;
    for (const auto& [n, v] : e) acc += v * x[n];
    return acc;
  }
  double dot(const Vec& x) const { return dot(std::span<const double>(x.data(), x.size())); }
};

/// tau . grad_ref at top node (i, J): centered in x, one-sided into the
/// domain in z. Valid for 1 <= i <= Nx-2.
Row top_conormal_row(const ReferenceDomain& dom, const Vec& tau_x, const Vec& tau_z, int i);

/// Outward normal difference on a side wall column (i in {0, Nx-1}).
Row side_outward_row(const ReferenceDomain& dom, int i, int j);

/// Outward normal difference at the plate edge (j = 0), i.e. -d/dz.
Row bottom_outward_row(const ReferenceDomain& dom, int i);

class LuSolver {
 public:
  void factorize(const Eigen::SparseMatrix<double>& A);
  Vec solve(const Vec& rhs, double* residual_out = nullptr) const;
  bool ready() const { return ready_; }

 private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  Eigen::SparseMatrix<double> A_;
  bool ready_ = false;
};

/// Constant-matrix trapezoidal step for the linear extension field. The
/// unknown is the new velocity level; the displacement update follows.
class PbarStep {
 public:
  PbarStep(const PhysicalParams& params, const MappedCoefficients& coeffs, const TimeGrid& tg);

  /// Advance one step. g_plus holds the boundary data at the new level
  /// (B-grid array); extra_* are optional additive forcings used by the
  /// linearized solve.
  struct Extras {
    const double* interior_mid = nullptr;      // forcing on interior rows
    const double* neumann_plus = nullptr;      // extra data on the top rows
  };
  Vec advance(std::span<const double> p_n, std::span<const double> v_n, const double* g_plus,
              const Extras& extras, SolveStats& stats) const;

  const SparseOperator& d2() const { return d2_; }
  const MappedCoefficients& coeffs() const { return coeffs_; }

 private:
  PhysicalParams params_;
  const MappedCoefficients& coeffs_;
  ReferenceDomain dom_;
  double dt_;
  SparseOperator d2_;
  LuSolver lu_;
};

/// Inputs of one coupled remainder-pressure/plate step.
struct PtilStepInputs {
  std::span<const double> ptil_n, vtil_n;
  std::span<const double> wtil_n, om_n;
  Vec pbar_mid, vbar_mid, pbar_tt_mid;
  Vec h_mid;
  const double* f_ptil_mid = nullptr;
  const double* f_w_mid = nullptr;
  const double* f_pl_plus = nullptr;
};

/// Nonlinear trapezoidal step for the coupled system, in midpoint-residual
/// form. Unknown vector layout: [acoustic velocity (N); plate rate (Npl)].
class PtilStep {
 public:
  PtilStep(const PhysicalParams& params, const MappedCoefficients& coeffs, const TimeGrid& tg);

  int size() const { return N_ + Npl_; }
  int acoustic_size() const { return N_; }

  /// Residual at iterate (a, om). Returns the non-degeneracy margin through
  /// margin_out (min over nodes of the midpoint leading coefficient).
  Vec residual(const PtilStepInputs& in, const Vec& a, const Vec& om, double* margin_out) const;

  Eigen::SparseMatrix<double> jacobian(const PtilStepInputs& in, const Vec& a) const;

  /// Action of the derivative with respect to the previous level on a
  /// tangent (dptil_n, dvtil_n, dwtil_n, dom_n).
  Vec dR_dprev(const PtilStepInputs& in, const Vec& a, std::span<const double> dptil_n,
               std::span<const double> dvtil_n, std::span<const double> dwtil_n,
               std::span<const double> dom_n) const;

  /// Action of the derivative with respect to the extension-field inputs.
  Vec dR_dpbar(const PtilStepInputs& in, const Vec& a, const Vec& dpbar_mid, const Vec& dvbar_mid,
               const Vec& dpbar_tt_mid) const;

  /// Action of the derivative with respect to the profile, through the
  /// operator coefficients. dD2 is the assembled coefficient-derivative
  /// operator; dtau_* the top-row coefficient derivatives.
  Vec dR_dprofile(const PtilStepInputs& in, const Vec& a, const SparseOperator& dD2,
                  const Vec& dtau_x, const Vec& dtau_z) const;

  const SparseOperator& d2() const { return d2_; }
  const SparseOperator& plate_op() const { return plate_; }
  bool has_plate_damping() const { return params_.beta_pl > 0.0; }
  const SparseOperator& plate_damping() const { return plate_damping_; }

  /// Midpoint state of the acoustic fields for iterate a.
  void midpoints(const PtilStepInputs& in, const Vec& a, Vec& ptil_mid, Vec& vtil_mid,
                 Vec& ptil_tt_mid) const;

 private:
  PhysicalParams params_;
  const MappedCoefficients& coeffs_;
  ReferenceDomain dom_;
  double dt_;
  int N_, Npl_;
  SparseOperator d2_, plate_, plate_damping_;
};

inline Vec midpoint_of(std::span<const double> lo, std::span<const double> hi) {
  Vec out(lo.size());
  for (size_t i = 0; i < lo.size(); ++i) out[i] = 0.5 * (lo[i] + hi[i]);
  return out;
}

inline Vec quotient_of(std::span<const double> lo, std::span<const double> hi, double dt) {
  Vec out(lo.size());
  for (size_t i = 0; i < lo.size(); ++i) out[i] = (hi[i] - lo[i]) / dt;
  return out;
}

}  // namespace aopt::detail
