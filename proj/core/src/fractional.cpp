// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/fractional.hpp"

#include <cmath>

namespace aopt {

NeumannSpectrum::NeumannSpectrum(int nodes, double length) : n_(nodes) {
  if (nodes < 2) fail(ErrorKind::GridTooCoarse, "fractional operator needs at least 2 nodes");
  dx_ = length / (nodes - 1);
  lambda_.assign(n_, 0.0);
  basis_.assign(static_cast<size_t>(n_) * n_, 0.0);
  mode_norm_.assign(n_, 0.0);
  for (int k = 0; k < n_; ++k) {
    const double theta = k * M_PI / (n_ - 1);
    lambda_[k] = (2.0 - 2.0 * std::cos(theta)) / (dx_ * dx_);
    double nk = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double v = std::cos(theta * i);
      basis_[static_cast<size_t>(k) * n_ + i] = v;
      const double w = (i == 0 || i == n_ - 1) ? 0.5 : 1.0;
      nk += w * v * v;
    }
    mode_norm_[k] = nk;
  }
}

Vec NeumannSpectrum::to_modes(const Vec& field) const {
  check_shape(static_cast<int>(field.size()) == n_, "NeumannSpectrum::to_modes");
  Vec modes(n_, 0.0);
  for (int k = 0; k < n_; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double w = (i == 0 || i == n_ - 1) ? 0.5 : 1.0;
      acc += w * basis_[static_cast<size_t>(k) * n_ + i] * field[i];
    }
    modes[k] = acc / mode_norm_[k];
  }
  return modes;
}

Vec NeumannSpectrum::from_modes(const Vec& modes) const {
  check_shape(static_cast<int>(modes.size()) == n_, "NeumannSpectrum::from_modes");
  Vec field(n_, 0.0);
  for (int k = 0; k < n_; ++k) {
    const double c = modes[k];
    if (c == 0.0) continue;
    for (int i = 0; i < n_; ++i) field[i] += c * basis_[static_cast<size_t>(k) * n_ + i];
  }
  return field;
}

Vec NeumannSpectrum::apply(const Vec& field, double s) const {
  Vec modes = to_modes(field);
  for (int k = 0; k < n_; ++k) modes[k] *= std::pow(lambda_[k] + 1.0, s);
  return from_modes(modes);
}

double NeumannSpectrum::hs_norm_sq(const Vec& field, double s) const {
  const Vec modes = to_modes(field);
  double acc = 0.0;
  for (int k = 0; k < n_; ++k)
    acc += std::pow(lambda_[k] + 1.0, s) * mode_norm_[k] * modes[k] * modes[k];
  return acc * dx_;
}

Vec fractional_neumann_apply(const Vec& field, const FractionalSpec& spec) {
  if (spec.s == 0.0) return field;
  NeumannSpectrum spectrum(spec.nodes, spec.length);
  return spectrum.apply(field, spec.s);
}

}  // namespace aopt
