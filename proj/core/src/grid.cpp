// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/grid.hpp"

namespace aopt {

Edge edge_from_string(const std::string& name) {
  if (name == "top") return Edge::Top;
  if (name == "bottom") return Edge::Bottom;
  if (name == "left") return Edge::Left;
  if (name == "right") return Edge::Right;
  fail(ErrorKind::UnknownEdge, "unknown edge tag '" + name + "'");
}

void ReferenceDomain::validate() const {
  if (!(Lx > 0.0)) fail(ErrorKind::ConfigInvalid, "Lx must be positive");
  if (H_fix < 0.0) fail(ErrorKind::ConfigInvalid, "H_fix must be nonnegative");
  if (!(ell0 > 0.0) || !std::isfinite(1.0 / ell0))
    fail(ErrorKind::ConfigInvalid, "ell0 must be positive with finite reciprocal");
  if (Nx < 5) fail(ErrorKind::GridTooCoarse, "Nx must be at least 5");
  if (Nz_var < 4) fail(ErrorKind::GridTooCoarse, "Nz_var must be at least 4");
  if (has_fix() && Nz_fix < 3) fail(ErrorKind::GridTooCoarse, "Nz_fix must be at least 3 when H_fix > 0");
  if (!has_fix() && Nz_fix != 0) fail(ErrorKind::ConfigInvalid, "Nz_fix must be 0 when H_fix == 0");
  if (plate_nodes() < 5) fail(ErrorKind::GridTooCoarse, "plate needs at least 5 nodes");
}

}  // namespace aopt
