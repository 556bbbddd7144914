// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "aopt/energy.hpp"

namespace fs = std::filesystem;

namespace aopt {

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularSystem:
    case ErrorKind::NonDegeneracyViolated:
    case ErrorKind::NewtonDiverged:
    case ErrorKind::LineSearchStalled:
      return 3;
    default:
      return 2;
  }
}

struct Setup {
  RunConfig cfg;
  Problem problem;
  ControlVector controls;
  fs::path out;
};

ControlVector build_controls(const RunConfig& cfg) {
  ControlVector u;
  u.g = build_boundary_control(cfg.g_init, cfg.dom, cfg.tg);
  u.h = build_plate_control(cfg.h_init, cfg.dom, cfg.tg);
  u.ell = build_profile(cfg.ell_init, cfg.dom);
  u.g0 = build_boundary_control(cfg.g_prior, cfg.dom, cfg.tg);
  u.h0 = build_plate_control(cfg.h_prior, cfg.dom, cfg.tg);
  u.ell0 = constant_profile(cfg.dom);
  return u;
}

Targets build_targets(const RunConfig& cfg, const InitialData& init) {
  Targets t;
  t.roi_mask = roi_mask_rectangle(cfg.dom, cfg.roi_x0, cfg.roi_x1, cfg.roi_z0, cfg.roi_z1);
  if (cfg.targets_kind == "files") {
    if (cfg.p_d_file.empty() || cfg.w_d_file.empty())
      fail(ErrorKind::ConfigInvalid, "targets = files requires p_d_file and w_d_file");
    t.p_d = read_field_binary(cfg.p_d_file);
    t.w_d = read_field_binary(cfg.w_d_file);
    check_shape(t.p_d.levels == cfg.tg.Nt + 1 && t.p_d.n == cfg.dom.num_nodes(),
                "target pressure dump");
    check_shape(t.w_d.levels == cfg.tg.Nt + 1 && t.w_d.n == cfg.dom.plate_nodes(),
                "target plate dump");
    return t;
  }
  if (cfg.targets_kind != "manufactured")
    fail(ErrorKind::ConfigInvalid, "objective.targets must be manufactured or files");
  const SpaceTimeField g_dagger = build_boundary_control(cfg.target_g, cfg.dom, cfg.tg);
  const SpaceTimeField h_dagger = build_plate_control(cfg.target_h, cfg.dom, cfg.tg);
  const BoundaryProfile ell_dagger = build_profile(cfg.target_ell, cfg.dom);
  const StateTrajectory hidden =
      solve_forward(cfg.params, g_dagger, h_dagger, ell_dagger, cfg.dom, init, cfg.tg);
  t.p_d = SpaceTimeField(cfg.tg.Nt + 1, cfg.dom.num_nodes());
  for (size_t m = 0; m < t.p_d.data.size(); ++m)
    t.p_d.data[m] = hidden.pbar.data[m] + hidden.ptil.data[m];
  t.w_d = hidden.wtil;
  return t;
}

Setup make_setup(const std::string& config_path, const RunOptions& opts) {
  Setup s;
  s.cfg = RunConfig::load(config_path);
  if (!opts.out_override.empty()) s.cfg.out_dir = opts.out_override;
  s.out = fs::path(s.cfg.out_dir);
  fs::create_directories(s.out);

  if (s.cfg.dom.H_fix > 0.0 && s.cfg.roi_z1 > 1e-12)
    fail(ErrorKind::ConfigInvalid, "region of interest must lie in the fixed block (roi_z1 <= 0)");
  if (s.cfg.dom.H_fix == 0.0)
    std::cout << "note: H_fix = 0, region of interest interpreted in reference coordinates\n";
  if (s.cfg.reg.s_g < 0.5 || s.cfg.reg.s_ell <= 2.5)
    std::cout << "note: smoothing exponents below the default regularity tier\n";

  s.problem.dom = s.cfg.dom;
  s.problem.params = s.cfg.params;
  s.problem.tg = s.cfg.tg;
  s.problem.init = build_initial_data(s.cfg);
  s.problem.targets = build_targets(s.cfg, s.problem.init);
  s.problem.reg = s.cfg.reg;
  s.controls = build_controls(s.cfg);

  std::ofstream echo(s.out / "effective_config.ini");
  echo << s.cfg.serialize();
  return s;
}

void dump_state(const Setup& s, const StateTrajectory& traj) {
  if (!s.cfg.dump_fields) return;
  const int nx = s.cfg.dom.Nx;
  const int nz = s.cfg.dom.nz();
  write_field_binary((s.out / "pbar.bin").string(), traj.pbar, nx, nz);
  write_field_binary((s.out / "ptil.bin").string(), traj.ptil, nx, nz);
  write_field_binary((s.out / "wtil.bin").string(), traj.wtil, nx, 1);
  write_field_binary((s.out / "wtil_vel.bin").string(), traj.wtil_vel, nx, 1);
  write_dump_index((s.out / "fields.csv").string(),
                   {{"pbar", "pbar.bin", traj.levels(), nx, nz},
                    {"ptil", "ptil.bin", traj.levels(), nx, nz},
                    {"wtil", "wtil.bin", traj.levels(), nx, 1},
                    {"wtil_vel", "wtil_vel.bin", traj.levels(), nx, 1}},
                   traj.dt);
}

void dump_probes(const Setup& s, const StateTrajectory& traj) {
  if (s.cfg.probes.empty()) return;
  std::vector<std::pair<int, int>> nodes;
  std::istringstream list(s.cfg.probes);
  std::string tok;
  while (std::getline(list, tok, ';')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) fail(ErrorKind::ConfigInvalid, "probes: expected x:z pairs");
    const double px = std::stod(tok.substr(0, colon));
    const double pz = std::stod(tok.substr(colon + 1));
    int bi = 0, bj = 0;
    double best = 1e300;
    for (int i = 0; i < s.cfg.dom.Nx; ++i)
      for (int j = 0; j < s.cfg.dom.nz(); ++j) {
        const double d = std::hypot(s.cfg.dom.x(i) - px, s.cfg.dom.zhat(j) - pz);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    nodes.emplace_back(bi, bj);
  }
  std::ofstream out(s.out / "probes.csv");
  out << "t";
  for (const auto& [i, j] : nodes) out << ",p_" << i << "_" << j;
  out << "\n";
  for (int n = 0; n <= traj.Nt; ++n) {
    out << to17(n * traj.dt);
    for (const auto& [i, j] : nodes) {
      const int m = s.cfg.dom.idx(i, j);
      out << "," << to17(traj.pbar.at(n, m) + traj.ptil.at(n, m));
    }
    out << "\n";
  }
}

void write_history_csv(const fs::path& path, const IterateHistory& history) {
  std::ofstream out(path);
  out << "iter,tracking_p,tracking_w,reg_g_time,reg_g_space,reg_h,reg_ell,total,grad_norm_g,"
         "grad_norm_h,grad_norm_ell,grad_norm,step,ls_trials,nondegeneracy_margin\n";
  for (const IterateRecord& r : history) {
    out << r.iter << "," << to17(r.breakdown.tracking_p) << "," << to17(r.breakdown.tracking_w) << ","
        << to17(r.breakdown.reg_g_time) << "," << to17(r.breakdown.reg_g_space) << ","
        << to17(r.breakdown.reg_h) << "," << to17(r.breakdown.reg_ell) << ","
        << to17(r.breakdown.total) << "," << to17(r.grad_norm_g) << "," << to17(r.grad_norm_h) << ","
        << to17(r.grad_norm_ell) << "," << to17(r.grad_norm) << "," << to17(r.step) << ","
        << r.ls_trials << "," << to17(r.nondegeneracy_margin) << "\n";
  }
}

void write_controls(const fs::path& dir, const ControlVector& u, const ReferenceDomain& dom) {
  fs::create_directories(dir);
  write_field_binary((dir / "g.bin").string(), u.g, dom.Nx, 1);
  write_field_binary((dir / "h.bin").string(), u.h, dom.plate_nodes(), 1);
  write_profile_csv((dir / "ell.csv").string(), u.ell, dom);
}

int cmd_forward(Setup& s) {
  const Evaluation ev = evaluate_reduced(s.problem, s.controls);
  dump_state(s, ev.states);
  dump_probes(s, ev.states);
  double maxp = 0.0;
  for (size_t m = 0; m < ev.states.ptil.data.size(); ++m)
    maxp = std::max(maxp, std::abs(ev.states.pbar.data[m] + ev.states.ptil.data[m]));
  const MappedCoefficients coeffs = transform_coefficients(s.controls.ell, s.cfg.dom);
  const CompatibilityReport compat =
      compatibility_residuals(s.problem.init, s.cfg.params, coeffs,
                              Vec(s.controls.h.level(0).begin(), s.controls.h.level(0).end()));
  std::cout << "forward: J = " << to17(ev.breakdown.total) << " max|p| = " << to17(maxp)
            << " margin = " << to17(ev.states.nondegeneracy_margin)
            << " compat = " << to17(compat.max_abs()) << "\n";
  return 0;
}

int cmd_energy(Setup& s) {
  const Evaluation ev = evaluate_reduced(s.problem, s.controls);
  const auto series = energy_series(ev.states, s.cfg.params, s.controls.ell, s.cfg.dom);
  std::ofstream out(s.out / "energy.csv");
  out << "t,pbar_tt_hist,pbar_t_h1,pbar_lap,pbar_lap_t_hist,pbar_bnd_hist,pbar_bnd,"
         "ptil_tt_hist,ptil_t_h1,ptil_lap,ptil_lap_t_hist,ptil_bnd_hist,ptil_bnd,w_rate,w_lap,total\n";
  double max_total = 0.0;
  for (const EnergyRecord& r : series) {
    max_total = std::max(max_total, r.total);
    out << to17(r.t) << "," << to17(r.pbar_tt_hist) << "," << to17(r.pbar_t_h1) << ","
        << to17(r.pbar_lap) << "," << to17(r.pbar_lap_t_hist) << "," << to17(r.pbar_bnd_hist) << ","
        << to17(r.pbar_bnd) << "," << to17(r.ptil_tt_hist) << "," << to17(r.ptil_t_h1) << ","
        << to17(r.ptil_lap) << "," << to17(r.ptil_lap_t_hist) << "," << to17(r.ptil_bnd_hist) << ","
        << to17(r.ptil_bnd) << "," << to17(r.w_rate) << "," << to17(r.w_lap) << "," << to17(r.total)
        << "\n";
  }
  const double data = data_norm_sq(s.controls.g, s.controls.h, s.controls.ell, s.cfg.dom, s.cfg.tg,
                                   s.cfg.reg.s_g);
  const EnergyIdentityReport id =
      pbar_energy_identity(ev.states, s.cfg.params, s.controls.g, s.controls.ell, s.cfg.dom);
  const double denom = series.front().total + data;
  std::cout << "energy: max = " << to17(max_total) << " ratio = "
            << to17(denom > 0.0 ? max_total / denom : 0.0) << " identity_defect = " << to17(id.defect)
            << "\n";
  return 0;
}

int cmd_adjoint(Setup& s) {
  const Evaluation ev = evaluate_reduced(s.problem, s.controls);
  AdjointTrajectory adj =
      solve_adjoint(s.cfg.params, ev.states, s.problem.targets, s.controls.ell, s.cfg.dom);
  extract_multipliers(adj, s.cfg.params, s.controls.ell);
  if (s.cfg.dump_fields) {
    const int nx = s.cfg.dom.Nx, nz = s.cfg.dom.nz();
    write_field_binary((s.out / "qbar.bin").string(), adj.qbar, nx, nz);
    write_field_binary((s.out / "qtil.bin").string(), adj.qtil, nx, nz);
    write_field_binary((s.out / "vtil.bin").string(), adj.vtil, nx, 1);
  }
  auto write_mu = [&](const fs::path& path, const SpaceTimeField& mu) {
    std::ofstream out(path);
    out << "t,node,value\n";
    for (int n = 0; n < mu.levels; ++n)
      for (int i = 0; i < mu.n; ++i)
        out << to17(n * adj.dt) << "," << i << "," << to17(mu.at(n, i)) << "\n";
  };
  write_mu(s.out / "mu_N.csv", adj.mu_N);
  write_mu(s.out / "mu_pl.csv", adj.mu_pl);
  double max_mu = 0.0;
  for (double v : adj.mu_N.data) max_mu = std::max(max_mu, std::abs(v));
  std::cout << "adjoint: J = " << to17(ev.breakdown.total) << " max|mu_N| = " << to17(max_mu) << "\n";
  return 0;
}

int cmd_gradcheck(Setup& s, const RunOptions& opts) {
  const Evaluation ev = evaluate_reduced(s.problem, s.controls);
  const ControlTangent grad = reduced_gradient(s.problem, s.controls, ev.states);
  const Vec taus = {3e-2, 1e-2, 3e-3, 1e-3};

  std::ofstream out(s.out / "gradcheck.csv");
  out << "component,direction,adjoint,fd,rel_error,plateau_tau\n";
  double worst = 0.0;
  const std::vector<std::string> comps = {"g", "h", "ell"};
  for (const std::string& comp : comps) {
    for (int d = 0; d < s.cfg.gradcheck_dirs; ++d) {
      const ControlTangent dir =
          make_check_direction(s.cfg.dom, s.cfg.tg, comp, s.cfg.seed + 17u * d);
      const double adj_val = tangent_inner(grad, dir, s.cfg.dom, s.cfg.tg);
      const FdOracleReport fd = fd_gradient_oracle(s.problem, s.controls, dir, taus, opts.jobs);
      const double rel =
          std::abs(adj_val - fd.plateau_value) / std::max(std::abs(fd.plateau_value), 1e-300);
      worst = std::max(worst, rel);
      out << comp << "," << d << "," << to17(adj_val) << "," << to17(fd.plateau_value) << ","
          << to17(rel) << "," << to17(fd.plateau_tau) << "\n";
    }
  }
  std::cout << "gradcheck: max rel error = " << to17(worst) << " tol = " << to17(s.cfg.gradcheck_tol)
            << "\n";
  return worst <= s.cfg.gradcheck_tol ? 0 : 4;
}

int cmd_taylor(Setup& s, const RunOptions& opts) {
  ControlTangent dir = make_check_direction(s.cfg.dom, s.cfg.tg, "g", s.cfg.seed);
  const ControlTangent dh = make_check_direction(s.cfg.dom, s.cfg.tg, "h", s.cfg.seed + 1);
  const ControlTangent de = make_check_direction(s.cfg.dom, s.cfg.tg, "ell", s.cfg.seed + 2);
  dir.h = dh.h;
  dir.ell = de.ell;
  const Vec taus = {1e-1, 1e-2, 1e-3, 1e-4};
  const TaylorReport rep = taylor_test(s.problem, s.controls, dir, taus, opts.jobs);
  std::ofstream out(s.out / "taylor.csv");
  out << "tau,remainder\n";
  for (size_t k = 0; k < rep.taus.size(); ++k)
    out << to17(rep.taus[k]) << "," << to17(rep.remainders[k]) << "\n";
  const double slope = rep.slope_over(1e-3, 1e-1);
  std::cout << "taylor: slope = " << to17(slope) << " min = " << to17(s.cfg.taylor_slope_min) << "\n";
  return slope >= s.cfg.taylor_slope_min ? 0 : 4;
}

int cmd_optimize(Setup& s, const RunOptions& opts) {
  if (opts.resume) {
    int last = -1;
    const fs::path ckroot = s.out / "checkpoints";
    if (fs::exists(ckroot)) {
      for (const auto& entry : fs::directory_iterator(ckroot)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("iter_", 0) == 0) last = std::max(last, std::stoi(name.substr(5)));
      }
    }
    if (last >= 0) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "iter_%04d", last);
      const fs::path dir = ckroot / buf;
      s.controls.g = read_field_binary((dir / "g.bin").string());
      s.controls.h = read_field_binary((dir / "h.bin").string());
      s.controls.ell = read_profile_csv((dir / "ell.csv").string(), s.cfg.dom);
      std::cout << "resume: starting from checkpoint " << last << "\n";
    }
  }
  const auto checkpoint = [&](int iter, const ControlVector& u, const IterateRecord&) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "iter_%04d", iter);
    write_controls(s.out / "checkpoints" / buf, u, s.cfg.dom);
  };
  const OptimizeResult res = optimize(s.cfg.opt, s.problem, s.controls, checkpoint);
  write_history_csv(s.out / "history.csv", res.history);
  write_controls(s.out / "final", res.controls, s.cfg.dom);
  std::cout << "optimize: J0 = " << to17(res.history.front().breakdown.total)
            << " J = " << to17(res.history.back().breakdown.total)
            << " iters = " << res.history.back().iter << " converged = " << (res.converged ? 1 : 0)
            << "\n";
  return 0;
}

}  // namespace

ControlTangent make_check_direction(const ReferenceDomain& dom, const TimeGrid& tg,
                                    const std::string& component, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double a[4], ph[4];
  for (int m = 0; m < 4; ++m) {
    a[m] = uni(rng);
    ph[m] = uni(rng);
  }

  ControlTangent t = ControlTangent::zeros(dom, tg.Nt);
  if (component == "g" || component == "h") {
    SpaceTimeField& f = component == "g" ? t.g : t.h;
    const int nsp = f.n;
    // single-signed smooth time window; low spatial modes with random
    // amplitudes. Oscillatory directions make the directional derivative
    // cancel and the check noise-dominated.
    for (int n = 0; n <= tg.Nt; ++n) {
      const double tf = static_cast<double>(n) / tg.Nt;
      const double window = tf * tf * (1.0 - 0.5 * tf) * (1.0 + 0.3 * a[0] * tf);
      for (int i = 0; i < nsp; ++i) {
        const double xf = static_cast<double>(i) / (nsp - 1);
        double v = 1.0;
        for (int m = 1; m <= 3; ++m) v += 0.45 * a[m] * std::cos(m * M_PI * xf + 0.2 * ph[m]);
        f.at(n, i) = window * v;
      }
    }
    for (int i = 0; i < nsp; ++i) {
      f.at(0, i) = 0.0;
      if (component == "g") f.at(1, i) = 0.0;
    }
    const double nrm = component == "g" ? std::sqrt(control_inner_g(t.g, t.g, dom, tg))
                                        : std::sqrt(control_inner_h(t.h, t.h, dom, tg));
    if (nrm > 0.0)
      for (double& v : f.data) v /= nrm;
  } else if (component == "ell") {
    for (int i = 2; i < dom.Nx - 2; ++i) {
      const double xf = static_cast<double>(i) / (dom.Nx - 1);
      const double win = std::pow(std::sin(M_PI * xf), 4);
      double v = 1.0;
      for (int m = 1; m <= 3; ++m) v += 0.45 * a[m] * std::cos(m * M_PI * xf + 0.2 * ph[m]);
      t.ell[i] = win * v;
    }
    const double nrm = std::sqrt(control_inner_ell(t.ell, t.ell, dom));
    if (nrm > 0.0)
      for (double& v : t.ell) v /= nrm;
  } else {
    fail(ErrorKind::ConfigInvalid, "unknown direction component " + component);
  }
  return t;
}

int run_command(const std::string& command, const std::string& config_path, const RunOptions& opts) {
  try {
    Setup s = make_setup(config_path, opts);
    if (command == "forward") return cmd_forward(s);
    if (command == "energy") return cmd_energy(s);
    if (command == "adjoint") return cmd_adjoint(s);
    if (command == "gradcheck") return cmd_gradcheck(s, opts);
    if (command == "taylor") return cmd_taylor(s, opts);
    if (command == "optimize") return cmd_optimize(s, opts);
    std::cerr << "error: unknown command '" << command << "'\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace aopt
