// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "step_common.hpp"

#include <cmath>

namespace aopt::detail {

Row top_conormal_row(const ReferenceDomain& dom, const Vec& tau_x, const Vec& tau_z, int i) {
  // third-order one-sided z-part: the boundary-row truncation controls the
  // multiplier trace quality that the gradients inherit
  Row r;
  const int J = dom.nz() - 1;
  const double dx = dom.dx();
  const double dz = dom.dz_var();
  r.add(dom.idx(i + 1, J), tau_x[i] / (2.0 * dx));
  r.add(dom.idx(i - 1, J), -tau_x[i] / (2.0 * dx));
  r.add(dom.idx(i, J), 11.0 * tau_z[i] / (6.0 * dz));
  r.add(dom.idx(i, J - 1), -18.0 * tau_z[i] / (6.0 * dz));
  r.add(dom.idx(i, J - 2), 9.0 * tau_z[i] / (6.0 * dz));
  r.add(dom.idx(i, J - 3), -2.0 * tau_z[i] / (6.0 * dz));
  return r;
}

Row side_outward_row(const ReferenceDomain& dom, int i, int j) {
  Row r;
  const double dx = dom.dx();
  if (i == 0) {
    r.add(dom.idx(0, j), 3.0 / (2.0 * dx));
    r.add(dom.idx(1, j), -4.0 / (2.0 * dx));
    r.add(dom.idx(2, j), 1.0 / (2.0 * dx));
  } else {
    r.add(dom.idx(dom.Nx - 1, j), 3.0 / (2.0 * dx));
    r.add(dom.idx(dom.Nx - 2, j), -4.0 / (2.0 * dx));
    r.add(dom.idx(dom.Nx - 3, j), 1.0 / (2.0 * dx));
  }
  return r;
}

Row bottom_outward_row(const ReferenceDomain& dom, int i) {
  Row r;
  const double dz = dom.dz_above(0);
  r.add(dom.idx(i, 0), 3.0 / (2.0 * dz));
  r.add(dom.idx(i, 1), -4.0 / (2.0 * dz));
  r.add(dom.idx(i, 2), 1.0 / (2.0 * dz));
  return r;
}

void LuSolver::factorize(const Eigen::SparseMatrix<double>& A) {
  A_ = A;
  A_.makeCompressed();
  lu_.compute(A_);
  if (lu_.info() != Eigen::Success) fail(ErrorKind::SingularSystem, "sparse factorization failed");
  ready_ = true;
}

Vec LuSolver::solve(const Vec& rhs, double* residual_out) const {
  if (!ready_) fail(ErrorKind::SingularSystem, "solver not factorized");
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), rhs.size());
  Eigen::VectorXd x = lu_.solve(b);
  if (lu_.info() != Eigen::Success) fail(ErrorKind::SingularSystem, "sparse solve failed");
  if (residual_out) {
    const Eigen::VectorXd r = A_ * x - b;
    const double bn = b.lpNorm<Eigen::Infinity>();
    *residual_out = bn > 0.0 ? r.lpNorm<Eigen::Infinity>() / bn : r.lpNorm<Eigen::Infinity>();
  }
  return Vec(x.data(), x.data() + x.size());
}

PbarStep::PbarStep(const PhysicalParams& params, const MappedCoefficients& coeffs, const TimeGrid& tg)
    : params_(params), coeffs_(coeffs), dom_(coeffs.dom), dt_(tg.dt()) {
  d2_ = assemble_mapped_d2(coeffs);
  const int N = dom_.num_nodes();
  const double c2 = params.c * params.c;

  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < dom_.Nx; ++i) {
    for (int j = 0; j < dom_.nz(); ++j) {
      const int n = dom_.idx(i, j);
      switch (dom_.classify(i, j)) {
        case NodeClass::Interior:
          trip.emplace_back(n, n, 1.0 / dt_);
          break;
        case NodeClass::GammaA: {
          const Row r = side_outward_row(dom_, i, j);
          for (const auto& [m, v] : r.e) trip.emplace_back(n, m, 0.5 * dt_ * v);
          trip.emplace_back(n, n, params.beta_a + 0.5 * dt_ * params.gamma_a);
          break;
        }
        case NodeClass::GammaN: {
          const Row r = top_conormal_row(dom_, coeffs.tau_x, coeffs.tau_z, i);
          for (const auto& [m, v] : r.e) trip.emplace_back(n, m, 0.5 * dt_ * v);
          break;
        }
        case NodeClass::GammaPl: {
          const Row r = bottom_outward_row(dom_, i);
          for (const auto& [m, v] : r.e) trip.emplace_back(n, m, 0.5 * dt_ * v);
          break;
        }
      }
    }
  }
  const double w = -(c2 * dt_ / 4.0 + params.b / 2.0);
  for (const auto& e : d2_.entries()) trip.emplace_back(e.row, e.col, w * e.value);

  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());
  lu_.factorize(A);
}

Vec PbarStep::advance(std::span<const double> p_n, std::span<const double> v_n, const double* g_plus,
                      const Extras& extras, SolveStats& stats) const {
  const int N = dom_.num_nodes();
  const double c2 = params_.c * params_.c;
  Vec phat4(N), phat2(N);
  for (int m = 0; m < N; ++m) {
    phat4[m] = p_n[m] + 0.25 * dt_ * v_n[m];
    phat2[m] = p_n[m] + 0.5 * dt_ * v_n[m];
  }
  const Vec d2_phat4 = d2_.apply(phat4);
  Vec vn_vec(v_n.begin(), v_n.end());
  const Vec d2_vn = d2_.apply(vn_vec);

  Vec rhs(N, 0.0);
  for (int i = 0; i < dom_.Nx; ++i) {
    for (int j = 0; j < dom_.nz(); ++j) {
      const int n = dom_.idx(i, j);
      switch (dom_.classify(i, j)) {
        case NodeClass::Interior:
          rhs[n] = v_n[n] / dt_ + c2 * d2_phat4[n] + 0.5 * params_.b * d2_vn[n];
          if (extras.interior_mid) rhs[n] += extras.interior_mid[n];
          break;
        case NodeClass::GammaA: {
          const Row r = side_outward_row(dom_, i, j);
          rhs[n] = -(r.dot(phat2) + params_.gamma_a * phat2[n]);
          break;
        }
        case NodeClass::GammaN: {
          const Row r = top_conormal_row(dom_, coeffs_.tau_x, coeffs_.tau_z, i);
          rhs[n] = (g_plus ? g_plus[i] : 0.0) - r.dot(phat2);
          if (extras.neumann_plus) rhs[n] += extras.neumann_plus[i];
          break;
        }
        case NodeClass::GammaPl: {
          const Row r = bottom_outward_row(dom_, i);
          rhs[n] = -r.dot(phat2);
          break;
        }
      }
    }
  }
  double lin_res = 0.0;
  Vec v_plus = lu_.solve(rhs, &lin_res);
  if (lin_res > 1e-8) stats.step_too_large = true;
  stats.max_linear_residual = std::max(stats.max_linear_residual, lin_res);
  return v_plus;
}

PtilStep::PtilStep(const PhysicalParams& params, const MappedCoefficients& coeffs, const TimeGrid& tg)
    : params_(params), coeffs_(coeffs), dom_(coeffs.dom), dt_(tg.dt()) {
  N_ = dom_.num_nodes();
  Npl_ = dom_.plate_nodes();
  d2_ = assemble_mapped_d2(coeffs);
  plate_ = assemble_plate_bilaplacian(dom_);
  if (params_.beta_pl > 0.0) plate_damping_ = assemble_plate_fractional(dom_, params_.gamma_pl);
}

void PtilStep::midpoints(const PtilStepInputs& in, const Vec& a, Vec& ptil_mid, Vec& vtil_mid,
                         Vec& ptil_tt_mid) const {
  ptil_mid.resize(N_);
  vtil_mid.resize(N_);
  ptil_tt_mid.resize(N_);
  for (int m = 0; m < N_; ++m) {
    ptil_mid[m] = in.ptil_n[m] + 0.25 * dt_ * (a[m] + in.vtil_n[m]);
    vtil_mid[m] = 0.5 * (a[m] + in.vtil_n[m]);
    ptil_tt_mid[m] = (a[m] - in.vtil_n[m]) / dt_;
  }
}

Vec PtilStep::residual(const PtilStepInputs& in, const Vec& a, const Vec& om,
                       double* margin_out) const {
  const double c2 = params_.c * params_.c;
  const double k = params_.k;
  Vec pmid, vmid, pttmid;
  midpoints(in, a, pmid, vmid, pttmid);

  const Vec d2_p = d2_.apply(pmid);
  const Vec d2_v = d2_.apply(vmid);

  Vec wmid(Npl_), om_mid(Npl_);
  for (int i = 0; i < Npl_; ++i) {
    wmid[i] = in.wtil_n[i] + 0.25 * dt_ * (om[i] + in.om_n[i]);
    om_mid[i] = 0.5 * (om[i] + in.om_n[i]);
  }
  const Vec bil_w = plate_.apply(wmid);
  Vec damp_om;
  if (has_plate_damping()) damp_om = plate_damping_.apply(om_mid);

  double margin = 1.0;
  Vec R(size(), 0.0);
  for (int i = 0; i < dom_.Nx; ++i) {
    for (int j = 0; j < dom_.nz(); ++j) {
      const int n = dom_.idx(i, j);
      const double total_p = in.pbar_mid[n] + pmid[n];
      const double alpha = 1.0 - 2.0 * k * total_p;
      margin = std::min(margin, alpha);
      switch (dom_.classify(i, j)) {
        case NodeClass::Interior: {
          const double vt = in.vbar_mid[n] + vmid[n];
          R[n] = alpha * pttmid[n] - c2 * d2_p[n] - params_.b * d2_v[n] - 2.0 * k * vt * vt -
                 2.0 * k * total_p * in.pbar_tt_mid[n];
          if (in.f_ptil_mid) R[n] -= in.f_ptil_mid[n];
          break;
        }
        case NodeClass::GammaA: {
          const Row r = side_outward_row(dom_, i, j);
          double pplus_dot = 0.0;
          for (const auto& [m, v] : r.e) pplus_dot += v * (in.ptil_n[m] + 0.5 * dt_ * (a[m] + in.vtil_n[m]));
          const double pplus = in.ptil_n[n] + 0.5 * dt_ * (a[n] + in.vtil_n[n]);
          R[n] = pplus_dot + params_.beta_a * a[n] + params_.gamma_a * pplus;
          break;
        }
        case NodeClass::GammaN: {
          const Row r = top_conormal_row(dom_, coeffs_.tau_x, coeffs_.tau_z, i);
          double dot = 0.0;
          for (const auto& [m, v] : r.e) dot += v * (in.ptil_n[m] + 0.5 * dt_ * (a[m] + in.vtil_n[m]));
          R[n] = dot;
          break;
        }
        case NodeClass::GammaPl: {
          const Row r = bottom_outward_row(dom_, i);
          double dot = 0.0;
          for (const auto& [m, v] : r.e) dot += v * (in.ptil_n[m] + 0.5 * dt_ * (a[m] + in.vtil_n[m]));
          R[n] = dot + params_.rho * om[i];
          if (in.f_pl_plus) R[n] -= in.f_pl_plus[i];
          break;
        }
      }
    }
  }
  for (int i = 0; i < Npl_; ++i) {
    const int row = N_ + i;
    if (i == 0 || i == Npl_ - 1) {
      R[row] = om[i];
      continue;
    }
    const int n_pl = dom_.idx(i, 0);
    R[row] = params_.rho * (om[i] - in.om_n[i]) / dt_ + params_.delta * bil_w[i] -
             params_.kappa * (vmid[n_pl] + in.vbar_mid[n_pl]) - in.h_mid[i];
    if (has_plate_damping()) R[row] += params_.beta_pl * damp_om[i];
    if (in.f_w_mid) R[row] -= in.f_w_mid[i];
  }
  if (margin_out) *margin_out = margin;
  return R;
}

Eigen::SparseMatrix<double> PtilStep::jacobian(const PtilStepInputs& in, const Vec& a) const {
  const double c2 = params_.c * params_.c;
  const double k = params_.k;
  Vec pmid, vmid, pttmid;
  midpoints(in, a, pmid, vmid, pttmid);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(16 * static_cast<size_t>(size()));
  const double wd2 = -(c2 * dt_ / 4.0 + params_.b / 2.0);

  for (int i = 0; i < dom_.Nx; ++i) {
    for (int j = 0; j < dom_.nz(); ++j) {
      const int n = dom_.idx(i, j);
      switch (dom_.classify(i, j)) {
        case NodeClass::Interior: {
          const double total_p = in.pbar_mid[n] + pmid[n];
          const double alpha = 1.0 - 2.0 * k * total_p;
          const double vt = in.vbar_mid[n] + vmid[n];
          const double diag = alpha / dt_ - 0.5 * k * dt_ * (pttmid[n] + in.pbar_tt_mid[n]) -
                              2.0 * k * vt;
          trip.emplace_back(n, n, diag);
          break;
        }
        case NodeClass::GammaA: {
          const Row r = side_outward_row(dom_, i, j);
          for (const auto& [m, v] : r.e) trip.emplace_back(n, m, 0.5 * dt_ * v);
          trip.emplace_back(n, n, params_.beta_a + 0.5 * dt_ * params_.gamma_a);
          break;
        }
        case NodeClass::GammaN: {
          const Row r = top_conormal_row(dom_, coeffs_.tau_x, coeffs_.tau_z, i);
          for (const auto& [m, v] : r.e) trip.emplace_back(n, m, 0.5 * dt_ * v);
          break;
        }
        case NodeClass::GammaPl: {
          const Row r = bottom_outward_row(dom_, i);
          for (const auto& [m, v] : r.e) trip.emplace_back(n, m, 0.5 * dt_ * v);
          trip.emplace_back(n, N_ + i, params_.rho);
          break;
        }
      }
    }
  }
  // interior rows: D2 acting on the midpoint fields
  for (const auto& e : d2_.entries()) trip.emplace_back(e.row, e.col, wd2 * e.value);

  for (int i = 1; i < Npl_ - 1; ++i) {
    const int row = N_ + i;
    trip.emplace_back(row, row, params_.rho / dt_);
    trip.emplace_back(row, dom_.idx(i, 0), -0.5 * params_.kappa);
  }
  for (const auto& e : plate_.entries()) {
    if (e.row == 0 || e.row == Npl_ - 1) continue;
    trip.emplace_back(N_ + e.row, N_ + e.col, params_.delta * 0.25 * dt_ * e.value);
  }
  if (has_plate_damping()) {
    for (const auto& e : plate_damping_.entries()) {
      if (e.row == 0 || e.row == Npl_ - 1) continue;
      trip.emplace_back(N_ + e.row, N_ + e.col, 0.5 * params_.beta_pl * e.value);
    }
  }
  trip.emplace_back(N_, N_, 1.0);
  trip.emplace_back(N_ + Npl_ - 1, N_ + Npl_ - 1, 1.0);

  Eigen::SparseMatrix<double> J(size(), size());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

Vec PtilStep::dR_dprev(const PtilStepInputs& in, const Vec& a, std::span<const double> dptil_n,
                       std::span<const double> dvtil_n, std::span<const double> dwtil_n,
                       std::span<const double> dom_n) const {
  const double c2 = params_.c * params_.c;
  const double k = params_.k;
  Vec pmid, vmid, pttmid;
  midpoints(in, a, pmid, vmid, pttmid);

  Vec dpmid(N_), dvmid(N_), dpplus(N_);
  for (int m = 0; m < N_; ++m) {
    dpmid[m] = dptil_n[m] + 0.25 * dt_ * dvtil_n[m];
    dvmid[m] = 0.5 * dvtil_n[m];
    dpplus[m] = dptil_n[m] + 0.5 * dt_ * dvtil_n[m];
  }
  const Vec d2_dp = d2_.apply(dpmid);
  const Vec d2_dv = d2_.apply(dvmid);

  Vec dwmid(Npl_), dommid(Npl_);
  for (int i = 0; i < Npl_; ++i) {
    dwmid[i] = dwtil_n[i] + 0.25 * dt_ * dom_n[i];
    dommid[i] = 0.5 * dom_n[i];
  }
  const Vec bil_dw = plate_.apply(dwmid);
  Vec damp_dom;
  if (has_plate_damping()) damp_dom = plate_damping_.apply(dommid);

  Vec out(size(), 0.0);
  for (int i = 0; i < dom_.Nx; ++i) {
    for (int j = 0; j < dom_.nz(); ++j) {
      const int n = dom_.idx(i, j);
      switch (dom_.classify(i, j)) {
        case NodeClass::Interior: {
          const double total_p = in.pbar_mid[n] + pmid[n];
          const double alpha = 1.0 - 2.0 * k * total_p;
          const double vt = in.vbar_mid[n] + vmid[n];
          out[n] = -alpha * dvtil_n[n] / dt_ -
                   2.0 * k * dpmid[n] * (pttmid[n] + in.pbar_tt_mid[n]) - c2 * d2_dp[n] -
                   params_.b * d2_dv[n] - 4.0 * k * vt * dvmid[n];
          break;
        }
        case NodeClass::GammaA: {
          const Row r = side_outward_row(dom_, i, j);
          out[n] = r.dot(dpplus) + params_.gamma_a * dpplus[n];
          break;
        }
        case NodeClass::GammaN: {
          const Row r = top_conormal_row(dom_, coeffs_.tau_x, coeffs_.tau_z, i);
          out[n] = r.dot(dpplus);
          break;
        }
        case NodeClass::GammaPl: {
          const Row r = bottom_outward_row(dom_, i);
          out[n] = r.dot(dpplus);
          break;
        }
      }
    }
  }
  for (int i = 1; i < Npl_ - 1; ++i) {
    const int row = N_ + i;
    out[row] = -params_.rho * dom_n[i] / dt_ + params_.delta * bil_dw[i] -
               params_.kappa * dvmid[dom_.idx(i, 0)];
    if (has_plate_damping()) out[row] += params_.beta_pl * damp_dom[i];
  }
  return out;
}

Vec PtilStep::dR_dpbar(const PtilStepInputs& in, const Vec& a, const Vec& dpbar_mid,
                       const Vec& dvbar_mid, const Vec& dpbar_tt_mid) const {
  const double k = params_.k;
  Vec pmid, vmid, pttmid;
  midpoints(in, a, pmid, vmid, pttmid);

  Vec out(size(), 0.0);
  for (int i = 1; i < dom_.Nx - 1; ++i) {
    for (int j = 1; j < dom_.nz() - 1; ++j) {
      const int n = dom_.idx(i, j);
      const double total_p = in.pbar_mid[n] + pmid[n];
      const double vt = in.vbar_mid[n] + vmid[n];
      out[n] = -2.0 * k * dpbar_mid[n] * (pttmid[n] + in.pbar_tt_mid[n]) -
               4.0 * k * vt * dvbar_mid[n] - 2.0 * k * total_p * dpbar_tt_mid[n];
    }
  }
  for (int i = 1; i < Npl_ - 1; ++i)
    out[N_ + i] = -params_.kappa * dvbar_mid[dom_.idx(i, 0)];
  return out;
}

Vec PtilStep::dR_dprofile(const PtilStepInputs& in, const Vec& a, const SparseOperator& dD2,
                          const Vec& dtau_x, const Vec& dtau_z) const {
  const double c2 = params_.c * params_.c;
  Vec pmid, vmid, pttmid;
  midpoints(in, a, pmid, vmid, pttmid);
  const Vec dd2_p = dD2.apply(pmid);
  const Vec dd2_v = dD2.apply(vmid);

  Vec pplus(N_);
  for (int m = 0; m < N_; ++m) pplus[m] = in.ptil_n[m] + 0.5 * dt_ * (a[m] + in.vtil_n[m]);

  Vec out(size(), 0.0);
  for (int i = 1; i < dom_.Nx - 1; ++i) {
    for (int j = 1; j < dom_.nz() - 1; ++j) {
      const int n = dom_.idx(i, j);
      out[n] = -c2 * dd2_p[n] - params_.b * dd2_v[n];
    }
    const int n_top = dom_.idx(i, dom_.nz() - 1);
    const Row dr = top_conormal_row(dom_, dtau_x, dtau_z, i);
    out[n_top] = dr.dot(pplus);
  }
  return out;
}

}  // namespace aopt::detail
