// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "aopt/grid.hpp"

namespace aopt {

/// Height profile of the graph boundary, sampled at the Nx nodes of B.
struct BoundaryProfile {
  Vec ell;
  double ell0_ref = 1.0;

  int size() const { return static_cast<int>(ell.size()); }
};

struct AdmissibilityReport {
  bool positive = true;       // ell > 0 everywhere
  bool close = true;          // max |ell - ell0| <= ell0 / 2
  bool endpoint_values = true;  // ell == ell0 at both ends of B
  bool endpoint_slopes = true;  // one-sided first difference of ell - ell0 vanishes
  double min_ell = 0.0;
  double max_deviation = 0.0;

  bool admissible() const { return positive && close && endpoint_values && endpoint_slopes; }
  std::string describe() const;
};

/// Pure check of the three admissibility conditions; violations are report
/// entries, never exceptions.
AdmissibilityReport validate_profile(const BoundaryProfile& profile, const ReferenceDomain& dom);

/// Positivity and closeness only. This is what the transform formulas need;
/// the endpoint traces are a constraint of the optimization space and are
/// enforced by the projection instead.
void require_mappable(const BoundaryProfile& profile, const ReferenceDomain& dom);

void require_admissible(const BoundaryProfile& profile, const ReferenceDomain& dom);

BoundaryProfile constant_profile(const ReferenceDomain& dom);

/// First derivative on B: centered interior, second-order one-sided ends.
Vec b_grid_d1(const Vec& f, double dx);
/// Second derivative on B: centered interior, one-sided 4-point ends.
Vec b_grid_d2(const Vec& f, double dx);
/// Transposes of the two stencil maps as plain matrices (for gradient assembly).
Vec b_grid_d1_transpose(const Vec& f, double dx);
Vec b_grid_d2_transpose(const Vec& f, double dx);

/// Two-column CSV with header `x,ell`, rows in ascending x.
void write_profile_csv(const std::string& path, const BoundaryProfile& profile, const ReferenceDomain& dom);
BoundaryProfile read_profile_csv(const std::string& path, const ReferenceDomain& dom);

}  // namespace aopt
