// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "aopt/optimizer.hpp"

namespace aopt {

/// Builder spec for one control field or profile.
struct ControlSpec {
  std::string kind = "zero";  // zero | pulse | file:<path>; profiles: ref | bump | file:<path>
  double amp = 0.0;
  double x0 = 0.5;     // pulse center (fraction of Lx)
  double sigma = 0.12;  // pulse width (fraction of Lx)
  double ton = 0.5;    // pulse window (fraction of T)
  double lo = 0.25, hi = 0.75;  // bump support (fractions of Lx)
};

/// Flat INI-style run configuration: [section] headers, key = value lines,
/// '#' comments, UTF-8.
struct RunConfig {
  ReferenceDomain dom;
  PhysicalParams params;
  TimeGrid tg;

  ControlSpec g_init, h_init, ell_init;
  ControlSpec g_prior, h_prior;
  std::string init_kind = "zero";  // zero | bump
  double init_amp = 0.0, init_x0 = 0.5, init_z0 = 0.5, init_radius = 0.2;

  std::string targets_kind = "manufactured";  // manufactured | files
  std::string p_d_file, w_d_file;
  ControlSpec target_g, target_h, target_ell;
  double roi_x0 = 0.0, roi_x1 = 1.0, roi_z0 = -0.25, roi_z1 = 0.0;
  RegConfig reg;

  OptimizerConfig opt;

  int gradcheck_dirs = 2;
  double gradcheck_tol = 1e-2;
  double taylor_slope_min = 1.9;
  unsigned seed = 2024;

  std::string out_dir = "out";
  bool dump_fields = false;
  std::string probes;  // "x:z;x:z" pairs

  static RunConfig load(const std::string& path);
  std::string serialize() const;
};

/// Raw INI access (exposed for tests).
std::map<std::string, std::map<std::string, std::string>> parse_ini(const std::string& path);

SpaceTimeField build_boundary_control(const ControlSpec& spec, const ReferenceDomain& dom,
                                      const TimeGrid& tg);
SpaceTimeField build_plate_control(const ControlSpec& spec, const ReferenceDomain& dom,
                                   const TimeGrid& tg);
BoundaryProfile build_profile(const ControlSpec& spec, const ReferenceDomain& dom);
InitialData build_initial_data(const RunConfig& cfg);

}  // namespace aopt
