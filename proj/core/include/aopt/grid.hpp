// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "aopt/common.hpp"

namespace aopt {

/// Boundary ownership of a grid node. Corners belong to the absorbing side
/// walls so the three boundary index sets stay disjoint.
enum class NodeClass { Interior, GammaA, GammaN, GammaPl };

enum class Edge { Top, Bottom, Left, Right };

Edge edge_from_string(const std::string& name);

/// Tensor-product reference domain: a fixed slab B x [-H_fix, 0] below a
/// variable box B x [0, ell0], with B = [0, Lx]. The top edge is the graph
/// boundary, the bottom edge carries the plate, the sides absorb.
struct ReferenceDomain {
  double Lx = 1.0;
  double H_fix = 0.25;
  double ell0 = 1.0;
  int Nx = 33;
  int Nz_fix = 9;   // nodes in [-H_fix, 0], both ends included; 0 when H_fix == 0
  int Nz_var = 33;  // nodes in [0, ell0], both ends included

  void validate() const;

  bool has_fix() const { return H_fix > 0.0; }
  int nz() const { return has_fix() ? Nz_fix + Nz_var - 1 : Nz_var; }
  int num_nodes() const { return Nx * nz(); }
  int plate_nodes() const { return Nx; }
  /// Row index of the z = 0 grid line.
  int j_interface() const { return has_fix() ? Nz_fix - 1 : 0; }
  int j_top() const { return nz() - 1; }

  double dx() const { return Lx / (Nx - 1); }
  double dz_fix() const { return has_fix() ? H_fix / (Nz_fix - 1) : 0.0; }
  double dz_var() const { return ell0 / (Nz_var - 1); }

  double x(int i) const { return i * dx(); }
  double zhat(int j) const {
    const int j0 = j_interface();
    return j < j0 ? -H_fix + j * dz_fix() : (j - j0) * dz_var();
  }
  /// Grid spacing of the z-interval below node j (between j-1 and j).
  double dz_below(int j) const { return j <= j_interface() ? dz_fix() : dz_var(); }
  double dz_above(int j) const { return j < j_interface() ? dz_fix() : dz_var(); }

  int idx(int i, int j) const { return i * nz() + j; }

  NodeClass classify(int i, int j) const {
    if (i == 0 || i == Nx - 1) return NodeClass::GammaA;
    if (j == 0) return NodeClass::GammaPl;
    if (j == nz() - 1) return NodeClass::GammaN;
    return NodeClass::Interior;
  }

  /// Trapezoid quadrature weight along x.
  double wx(int i) const { return (i == 0 || i == Nx - 1) ? 0.5 * dx() : dx(); }
  /// Trapezoid quadrature weight along z; handles unequal block spacings.
  double wz(int j) const {
    const double below = (j == 0) ? 0.0 : dz_below(j);
    const double above = (j == nz() - 1) ? 0.0 : dz_above(j);
    return 0.5 * (below + above);
  }
};

}  // namespace aopt
