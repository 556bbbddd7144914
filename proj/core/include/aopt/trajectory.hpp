// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>

#include "aopt/grid.hpp"

namespace aopt {

/// Space-time array with time as the slow index.
struct SpaceTimeField {
  int levels = 0;  // Nt + 1
  int n = 0;       // spatial size
  Vec data;

  SpaceTimeField() = default;
  SpaceTimeField(int levels_, int n_) : levels(levels_), n(n_), data(static_cast<size_t>(levels_) * n_, 0.0) {}

  std::span<double> level(int t) { return {data.data() + static_cast<size_t>(t) * n, static_cast<size_t>(n)}; }
  std::span<const double> level(int t) const {
    return {data.data() + static_cast<size_t>(t) * n, static_cast<size_t>(n)};
  }
  double& at(int t, int i) { return data[static_cast<size_t>(t) * n + i]; }
  double at(int t, int i) const { return data[static_cast<size_t>(t) * n + i]; }
};

/// Nodal time derivative by centered differences, one-sided at the ends.
SpaceTimeField fd_time_derivative(const SpaceTimeField& f, double dt);
SpaceTimeField fd_time_second_derivative(const SpaceTimeField& f, double dt);

struct SolveStats {
  int total_newton_iters = 0;
  int max_newton_iters = 0;
  double nondegeneracy_margin = 1.0;
  double max_linear_residual = 0.0;
  bool step_too_large = false;
};

/// Forward state: acoustic extension pbar, remainder ptil, plate rate wtil.
/// The *_vel fields are the evolved first-order-system velocities; the
/// discrete-derivative accessors recompute finite differences of the stored
/// fields so that stored derivatives and fields stay self-consistent.
struct StateTrajectory {
  ReferenceDomain dom;
  double dt = 0.0;
  double T = 0.0;
  int Nt = 0;

  SpaceTimeField pbar, pbar_vel;
  SpaceTimeField ptil, ptil_vel;
  SpaceTimeField wtil, wtil_vel;

  SpaceTimeField pbar_t, pbar_tt, ptil_t, ptil_tt;
  void compute_time_derivatives();

  double nondegeneracy_margin = 1.0;
  SolveStats stats_pbar, stats_ptil;

  int levels() const { return Nt + 1; }
};

/// Tracking targets: desired pressure on the region of interest (stored on
/// the full grid, masked) and desired plate rate.
struct Targets {
  SpaceTimeField p_d;  // levels x N
  SpaceTimeField w_d;  // levels x plate nodes
  Vec roi_mask;        // N entries in {0, 1}
};

/// Backward state with the extracted boundary multipliers.
struct AdjointTrajectory {
  ReferenceDomain dom;
  double dt = 0.0;
  double T = 0.0;
  int Nt = 0;

  SpaceTimeField qbar, qbar_vel;
  SpaceTimeField qtil, qtil_vel;
  SpaceTimeField vtil, vtil_vel;

  SpaceTimeField mu_N;   // levels x Nx
  SpaceTimeField mu_pl;  // levels x plate nodes

  int levels() const { return Nt + 1; }
};

/// Flat binary dump: 32-byte header (magic "AOPT", version, Nt+1, Nx, Nz as
/// little-endian u32, zero padding), then 8-byte little-endian doubles in
/// t-x-z order.
void write_field_binary(const std::string& path, const SpaceTimeField& f, int nx, int nz);
SpaceTimeField read_field_binary(const std::string& path, int* nx_out = nullptr, int* nz_out = nullptr);

/// Sidecar CSV listing dumped fields and their dimensions.
struct DumpEntry {
  std::string field;
  std::string file;
  int levels;
  int nx;
  int nz;
};
void write_dump_index(const std::string& path, const std::vector<DumpEntry>& entries, double dt);

}  // namespace aopt
