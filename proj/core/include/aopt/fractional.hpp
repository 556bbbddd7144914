// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/common.hpp"

namespace aopt {

enum class DomainTag { GammaN, B, GammaPl };

/// Fractional power (-Lap_N + id)^s of the discrete Neumann second difference
/// on a uniform 1D interval grid with both endpoints included.
struct FractionalSpec {
  double s = 0.5;
  DomainTag domain_tag = DomainTag::B;
  double length = 1.0;
  int nodes = 2;
};

/// Precomputed cosine eigenbasis of the discrete Neumann operator on a fixed
/// grid. Powers share the basis; the operator with exponent -s inverts the
/// one with +s exactly on the grid.
class NeumannSpectrum {
 public:
  NeumannSpectrum(int nodes, double length);

  int nodes() const { return n_; }
  /// Eigenvalues of the discrete -Lap_N (mirror-at-node reflection).
  const Vec& eigenvalues() const { return lambda_; }

  /// Apply (-Lap_N + id)^s.
  Vec apply(const Vec& field, double s) const;

  /// Weighted transform to cosine coefficients (trapezoid weights at the ends)
  /// and back; exposed for the norm diagnostics.
  Vec to_modes(const Vec& field) const;
  Vec from_modes(const Vec& modes) const;

  /// Discrete H^s norm squared with trapezoid quadrature: sum of weighted
  /// squares of (-Lap_N + id)^{s/2} f.
  double hs_norm_sq(const Vec& field, double s) const;

 private:
  int n_;
  double dx_;
  Vec lambda_;
  Vec basis_;      // column-major eigenvectors, n x n
  Vec mode_norm_;  // weighted norms of the eigenvectors
};

Vec fractional_neumann_apply(const Vec& field, const FractionalSpec& spec);

}  // namespace aopt
