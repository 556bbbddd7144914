// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace aopt {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

class Ini {
 public:
  explicit Ini(std::map<std::string, std::map<std::string, std::string>> data)
      : data_(std::move(data)) {}

  std::string str(const std::string& sec, const std::string& key, const std::string& dflt) const {
    const auto s = data_.find(sec);
    if (s == data_.end()) return dflt;
    const auto k = s->second.find(key);
    return k == s->second.end() ? dflt : k->second;
  }
  double num(const std::string& sec, const std::string& key, double dflt) const {
    const std::string v = str(sec, key, "");
    if (v.empty()) return dflt;
    try {
      return std::stod(v);
    } catch (...) {
      fail(ErrorKind::ConfigInvalid, sec + "." + key + ": not a number: '" + v + "'");
    }
  }
  int integer(const std::string& sec, const std::string& key, int dflt) const {
    return static_cast<int>(num(sec, key, dflt));
  }
  bool flag(const std::string& sec, const std::string& key, bool dflt) const {
    const std::string v = str(sec, key, dflt ? "on" : "off");
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    fail(ErrorKind::ConfigInvalid, sec + "." + key + ": expected on/off, got '" + v + "'");
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

ControlSpec read_spec(const Ini& ini, const std::string& sec, const std::string& prefix,
                      const std::string& default_kind) {
  ControlSpec s;
  s.kind = ini.str(sec, prefix, default_kind);
  s.amp = ini.num(sec, prefix + "_amp", s.amp);
  s.x0 = ini.num(sec, prefix + "_x0", s.x0);
  s.sigma = ini.num(sec, prefix + "_sigma", s.sigma);
  s.ton = ini.num(sec, prefix + "_ton", s.ton);
  s.lo = ini.num(sec, prefix + "_lo", s.lo);
  s.hi = ini.num(sec, prefix + "_hi", s.hi);
  return s;
}

void spec_lines(std::ostringstream& out, const std::string& prefix, const ControlSpec& s) {
  out << prefix << " = " << s.kind << "\n";
  out << prefix << "_amp = " << to17(s.amp) << "\n";
  out << prefix << "_x0 = " << to17(s.x0) << "\n";
  out << prefix << "_sigma = " << to17(s.sigma) << "\n";
  out << prefix << "_ton = " << to17(s.ton) << "\n";
  out << prefix << "_lo = " << to17(s.lo) << "\n";
  out << prefix << "_hi = " << to17(s.hi) << "\n";
}

}  // namespace

std::map<std::string, std::map<std::string, std::string>> parse_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open config " + path);
  std::map<std::string, std::map<std::string, std::string>> data;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(ErrorKind::ConfigInvalid, path + ":" + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::ConfigInvalid, path + ":" + std::to_string(lineno) + ": expected key = value");
    data[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return data;
}

RunConfig RunConfig::load(const std::string& path) {
  const Ini ini(parse_ini(path));
  RunConfig cfg;

  cfg.dom.Lx = ini.num("geometry", "Lx", cfg.dom.Lx);
  cfg.dom.H_fix = ini.num("geometry", "H_fix", cfg.dom.H_fix);
  cfg.dom.ell0 = ini.num("geometry", "ell0", cfg.dom.ell0);
  cfg.dom.Nx = ini.integer("geometry", "Nx", cfg.dom.Nx);
  cfg.dom.Nz_fix = ini.integer("geometry", "Nz_fix", cfg.dom.H_fix > 0.0 ? cfg.dom.Nz_fix : 0);
  cfg.dom.Nz_var = ini.integer("geometry", "Nz_var", cfg.dom.Nz_var);

  cfg.params.c = ini.num("physics", "c", cfg.params.c);
  cfg.params.b = ini.num("physics", "b", cfg.params.b);
  cfg.params.k = ini.num("physics", "k", cfg.params.k);
  cfg.params.rho = ini.num("physics", "rho", cfg.params.rho);
  cfg.params.delta = ini.num("physics", "delta", cfg.params.delta);
  cfg.params.kappa = ini.num("physics", "kappa", cfg.params.kappa);
  cfg.params.beta_a = ini.num("physics", "beta_a", 1.0 / cfg.params.c);
  cfg.params.gamma_a = ini.num("physics", "gamma_a", cfg.params.gamma_a);
  cfg.params.beta_pl = ini.num("physics", "beta_pl", cfg.params.beta_pl);
  cfg.params.gamma_pl = ini.num("physics", "gamma_pl", cfg.params.gamma_pl);

  cfg.tg.T = ini.num("time", "T", cfg.tg.T);
  cfg.tg.Nt = ini.integer("time", "Nt", cfg.tg.Nt);
  if (cfg.tg.Nt < 3) fail(ErrorKind::ConfigInvalid, "time.Nt must be at least 3");

  cfg.g_init = read_spec(ini, "controls", "g_init", "zero");
  cfg.h_init = read_spec(ini, "controls", "h_init", "zero");
  cfg.ell_init = read_spec(ini, "controls", "ell_init", "ref");
  cfg.g_prior = read_spec(ini, "controls", "g_prior", "zero");
  cfg.h_prior = read_spec(ini, "controls", "h_prior", "zero");
  cfg.init_kind = ini.str("controls", "init", "zero");
  cfg.init_amp = ini.num("controls", "init_amp", cfg.init_amp);
  cfg.init_x0 = ini.num("controls", "init_x0", cfg.init_x0);
  cfg.init_z0 = ini.num("controls", "init_z0", cfg.init_z0);
  cfg.init_radius = ini.num("controls", "init_radius", cfg.init_radius);

  cfg.targets_kind = ini.str("objective", "targets", "manufactured");
  cfg.p_d_file = ini.str("objective", "p_d_file", "");
  cfg.w_d_file = ini.str("objective", "w_d_file", "");
  cfg.target_g = read_spec(ini, "objective", "target_g", "zero");
  cfg.target_h = read_spec(ini, "objective", "target_h", "zero");
  cfg.target_ell = read_spec(ini, "objective", "target_ell", "ref");
  cfg.roi_x0 = ini.num("objective", "roi_x0", cfg.roi_x0);
  cfg.roi_x1 = ini.num("objective", "roi_x1", cfg.roi_x1);
  cfg.roi_z0 = ini.num("objective", "roi_z0", cfg.dom.H_fix > 0.0 ? -cfg.dom.H_fix : 0.0);
  cfg.roi_z1 = ini.num("objective", "roi_z1", cfg.dom.H_fix > 0.0 ? 0.0 : cfg.dom.ell0);
  cfg.reg.theta = ini.num("objective", "theta", cfg.reg.theta);
  cfg.reg.s_g = ini.num("objective", "s_g", cfg.reg.s_g);
  cfg.reg.s_ell = ini.num("objective", "s_ell", cfg.reg.s_ell);

  cfg.opt.max_iters = ini.integer("optimizer", "max_iters", cfg.opt.max_iters);
  cfg.opt.armijo_c1 = ini.num("optimizer", "armijo_c1", cfg.opt.armijo_c1);
  cfg.opt.step_init = ini.num("optimizer", "step_init", cfg.opt.step_init);
  cfg.opt.step_shrink = ini.num("optimizer", "step_shrink", cfg.opt.step_shrink);
  cfg.opt.grad_tol = ini.num("optimizer", "grad_tol", cfg.opt.grad_tol);
  const std::string mode = ini.str("optimizer", "mode", "lbfgs");
  if (mode == "gd")
    cfg.opt.mode = OptimizerConfig::Mode::GD;
  else if (mode == "lbfgs")
    cfg.opt.mode = OptimizerConfig::Mode::LBFGS;
  else
    fail(ErrorKind::ConfigInvalid, "optimizer.mode must be gd or lbfgs");
  cfg.opt.lbfgs_memory = ini.integer("optimizer", "lbfgs_m", cfg.opt.lbfgs_memory);
  cfg.opt.smooth_riesz = ini.flag("optimizer", "smooth_riesz", cfg.opt.smooth_riesz);

  cfg.gradcheck_dirs = ini.integer("checks", "gradcheck_dirs", cfg.gradcheck_dirs);
  cfg.gradcheck_tol = ini.num("checks", "gradcheck_tol", cfg.gradcheck_tol);
  cfg.taylor_slope_min = ini.num("checks", "taylor_slope_min", cfg.taylor_slope_min);
  cfg.seed = static_cast<unsigned>(ini.integer("checks", "seed", static_cast<int>(cfg.seed)));

  cfg.out_dir = ini.str("output", "dir", cfg.out_dir);
  cfg.dump_fields = ini.flag("output", "dump_fields", cfg.dump_fields);
  cfg.probes = ini.str("output", "probes", cfg.probes);

  cfg.dom.validate();
  cfg.params.validate();
  // minimum regularity for the smoothing exponents (d = 2)
  if (cfg.reg.s_g < 0.0) fail(ErrorKind::ConfigInvalid, "objective.s_g must be nonnegative");
  if (!(cfg.reg.s_ell > 1.5))
    fail(ErrorKind::ConfigInvalid, "objective.s_ell must exceed 3/2");
  return cfg;
}

std::string RunConfig::serialize() const {
  std::ostringstream out;
  out << "[geometry]\n";
  out << "Lx = " << to17(dom.Lx) << "\n";
  out << "H_fix = " << to17(dom.H_fix) << "\n";
  out << "ell0 = " << to17(dom.ell0) << "\n";
  out << "Nx = " << dom.Nx << "\n";
  out << "Nz_fix = " << dom.Nz_fix << "\n";
  out << "Nz_var = " << dom.Nz_var << "\n";
  out << "\n[physics]\n";
  out << "c = " << to17(params.c) << "\n";
  out << "b = " << to17(params.b) << "\n";
  out << "k = " << to17(params.k) << "\n";
  out << "rho = " << to17(params.rho) << "\n";
  out << "delta = " << to17(params.delta) << "\n";
  out << "kappa = " << to17(params.kappa) << "\n";
  out << "beta_a = " << to17(params.beta_a) << "\n";
  out << "gamma_a = " << to17(params.gamma_a) << "\n";
  out << "beta_pl = " << to17(params.beta_pl) << "\n";
  out << "gamma_pl = " << to17(params.gamma_pl) << "\n";
  out << "\n[time]\n";
  out << "T = " << to17(tg.T) << "\n";
  out << "Nt = " << tg.Nt << "\n";
  out << "\n[controls]\n";
  spec_lines(out, "g_init", g_init);
  spec_lines(out, "h_init", h_init);
  spec_lines(out, "ell_init", ell_init);
  spec_lines(out, "g_prior", g_prior);
  spec_lines(out, "h_prior", h_prior);
  out << "init = " << init_kind << "\n";
  out << "init_amp = " << to17(init_amp) << "\n";
  out << "init_x0 = " << to17(init_x0) << "\n";
  out << "init_z0 = " << to17(init_z0) << "\n";
  out << "init_radius = " << to17(init_radius) << "\n";
  out << "\n[objective]\n";
  out << "targets = " << targets_kind << "\n";
  if (!p_d_file.empty()) out << "p_d_file = " << p_d_file << "\n";
  if (!w_d_file.empty()) out << "w_d_file = " << w_d_file << "\n";
  spec_lines(out, "target_g", target_g);
  spec_lines(out, "target_h", target_h);
  spec_lines(out, "target_ell", target_ell);
  out << "roi_x0 = " << to17(roi_x0) << "\n";
  out << "roi_x1 = " << to17(roi_x1) << "\n";
  out << "roi_z0 = " << to17(roi_z0) << "\n";
  out << "roi_z1 = " << to17(roi_z1) << "\n";
  out << "theta = " << to17(reg.theta) << "\n";
  out << "s_g = " << to17(reg.s_g) << "\n";
  out << "s_ell = " << to17(reg.s_ell) << "\n";
  out << "\n[optimizer]\n";
  out << "max_iters = " << opt.max_iters << "\n";
  out << "armijo_c1 = " << to17(opt.armijo_c1) << "\n";
  out << "step_init = " << to17(opt.step_init) << "\n";
  out << "step_shrink = " << to17(opt.step_shrink) << "\n";
  out << "grad_tol = " << to17(opt.grad_tol) << "\n";
  out << "mode = " << (opt.mode == OptimizerConfig::Mode::GD ? "gd" : "lbfgs") << "\n";
  out << "lbfgs_m = " << opt.lbfgs_memory << "\n";
  out << "smooth_riesz = " << (opt.smooth_riesz ? "on" : "off") << "\n";
  out << "\n[checks]\n";
  out << "gradcheck_dirs = " << gradcheck_dirs << "\n";
  out << "gradcheck_tol = " << to17(gradcheck_tol) << "\n";
  out << "taylor_slope_min = " << to17(taylor_slope_min) << "\n";
  out << "seed = " << seed << "\n";
  out << "\n[output]\n";
  out << "dir = " << out_dir << "\n";
  out << "dump_fields = " << (dump_fields ? "on" : "off") << "\n";
  if (!probes.empty()) out << "probes = " << probes << "\n";
  return out.str();
}

namespace {

double pulse_window(double t, double t_on) {
  if (t_on <= 0.0 || t >= t_on || t <= 0.0) return 0.0;
  const double s = std::sin(M_PI * t / t_on);
  return s * s;
}

SpaceTimeField from_file(const std::string& path, int levels, int nx_expect) {
  int nx = 0, nz = 0;
  SpaceTimeField f = read_field_binary(path, &nx, &nz);
  if (f.levels != levels || nx != nx_expect || nz != 1)
    fail(ErrorKind::ShapeMismatch, path + ": control dump does not match the run grids");
  return f;
}

}  // namespace

SpaceTimeField build_boundary_control(const ControlSpec& spec, const ReferenceDomain& dom,
                                      const TimeGrid& tg) {
  if (spec.kind.rfind("file:", 0) == 0) return from_file(spec.kind.substr(5), tg.Nt + 1, dom.Nx);
  SpaceTimeField f(tg.Nt + 1, dom.Nx);
  if (spec.kind == "zero") return f;
  if (spec.kind != "pulse") fail(ErrorKind::ConfigInvalid, "unknown boundary control kind " + spec.kind);
  const double x0 = spec.x0 * dom.Lx;
  const double sig = std::max(1e-12, spec.sigma * dom.Lx);
  for (int n = 0; n <= tg.Nt; ++n) {
    const double w = pulse_window(n * tg.dt(), spec.ton * tg.T);
    for (int i = 0; i < dom.Nx; ++i) {
      const double dx = dom.x(i) - x0;
      f.at(n, i) = spec.amp * w * std::exp(-0.5 * dx * dx / (sig * sig));
    }
  }
  return f;
}

SpaceTimeField build_plate_control(const ControlSpec& spec, const ReferenceDomain& dom,
                                   const TimeGrid& tg) {
  if (spec.kind.rfind("file:", 0) == 0)
    return from_file(spec.kind.substr(5), tg.Nt + 1, dom.plate_nodes());
  SpaceTimeField f(tg.Nt + 1, dom.plate_nodes());
  if (spec.kind == "zero") return f;
  if (spec.kind != "pulse") fail(ErrorKind::ConfigInvalid, "unknown plate control kind " + spec.kind);
  const double x0 = spec.x0 * dom.Lx;
  const double sig = std::max(1e-12, spec.sigma * dom.Lx);
  for (int n = 0; n <= tg.Nt; ++n) {
    const double w = pulse_window(n * tg.dt(), spec.ton * tg.T);
    for (int i = 0; i < dom.plate_nodes(); ++i) {
      const double dx = dom.x(i) - x0;
      f.at(n, i) = spec.amp * w * std::exp(-0.5 * dx * dx / (sig * sig));
    }
  }
  return f;
}

BoundaryProfile build_profile(const ControlSpec& spec, const ReferenceDomain& dom) {
  if (spec.kind.rfind("file:", 0) == 0) return read_profile_csv(spec.kind.substr(5), dom);
  BoundaryProfile p = constant_profile(dom);
  if (spec.kind == "ref") return p;
  if (spec.kind != "bump") fail(ErrorKind::ConfigInvalid, "unknown profile kind " + spec.kind);
  const double lo = spec.lo * dom.Lx;
  const double hi = spec.hi * dom.Lx;
  for (int i = 2; i < dom.Nx - 2; ++i) {
    const double x = dom.x(i);
    if (x <= lo || x >= hi) continue;
    const double xi = (x - lo) / (hi - lo);
    const double s = std::sin(M_PI * xi);
    p.ell[i] += spec.amp * s * s * s * s;
  }
  return p;
}

InitialData build_initial_data(const RunConfig& cfg) {
  InitialData init = InitialData::zero(cfg.dom);
  if (cfg.init_kind == "zero") return init;
  if (cfg.init_kind != "bump") fail(ErrorKind::ConfigInvalid, "unknown init kind " + cfg.init_kind);
  const double x0 = cfg.init_x0 * cfg.dom.Lx;
  const double z0 = cfg.init_z0;
  const double R = cfg.init_radius;
  for (int i = 0; i < cfg.dom.Nx; ++i) {
    for (int j = 0; j < cfg.dom.nz(); ++j) {
      const double dx = cfg.dom.x(i) - x0;
      const double dz = cfg.dom.zhat(j) - z0;
      const double r2 = (dx * dx + dz * dz) / (R * R);
      if (r2 >= 1.0) continue;
      const double s = 1.0 - r2;
      init.p0[cfg.dom.idx(i, j)] = cfg.init_amp * s * s * s;
    }
  }
  return init;
}

}  // namespace aopt
