// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/profile.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace aopt {

namespace {
constexpr double kTraceTol = 1e-12;
}

std::string AdmissibilityReport::describe() const {
  if (admissible()) return "admissible";
  std::string s = "inadmissible:";
  if (!positive) s += " positivity";
  if (!close) s += " closeness";
  if (!endpoint_values) s += " endpoint-values";
  if (!endpoint_slopes) s += " endpoint-slopes";
  return s;
}

AdmissibilityReport validate_profile(const BoundaryProfile& profile, const ReferenceDomain& dom) {
  AdmissibilityReport rep;
  const int n = profile.size();
  if (n != dom.Nx) fail(ErrorKind::ShapeMismatch, "profile not sampled on the B grid");
  const double ell0 = profile.ell0_ref;
  const double tol = kTraceTol * std::max(1.0, std::abs(ell0));

  rep.min_ell = profile.ell[0];
  rep.max_deviation = 0.0;
  for (int i = 0; i < n; ++i) {
    rep.min_ell = std::min(rep.min_ell, profile.ell[i]);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(profile.ell[i] - ell0));
  }
  rep.positive = rep.min_ell > 0.0;
  // Closeness relative to the lower bound of ell0 keeps 1/ell under control.
  rep.close = rep.max_deviation <= 0.5 * ell0 + tol;
  rep.endpoint_values =
      std::abs(profile.ell[0] - ell0) <= tol && std::abs(profile.ell[n - 1] - ell0) <= tol;
  rep.endpoint_slopes = std::abs((profile.ell[1] - ell0) - (profile.ell[0] - ell0)) <= tol &&
                        std::abs((profile.ell[n - 1] - ell0) - (profile.ell[n - 2] - ell0)) <= tol;
  return rep;
}

void require_mappable(const BoundaryProfile& profile, const ReferenceDomain& dom) {
  const AdmissibilityReport rep = validate_profile(profile, dom);
  if (!rep.positive || !rep.close) fail(ErrorKind::InadmissibleProfile, rep.describe());
}

void require_admissible(const BoundaryProfile& profile, const ReferenceDomain& dom) {
  const AdmissibilityReport rep = validate_profile(profile, dom);
  if (!rep.admissible()) fail(ErrorKind::InadmissibleProfile, rep.describe());
}

BoundaryProfile constant_profile(const ReferenceDomain& dom) {
  BoundaryProfile p;
  p.ell.assign(dom.Nx, dom.ell0);
  p.ell0_ref = dom.ell0;
  return p;
}

Vec b_grid_d1(const Vec& f, double dx) {
  const int n = static_cast<int>(f.size());
  Vec g(n);
  g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
  for (int i = 1; i < n - 1; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
  g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
  return g;
}

Vec b_grid_d2(const Vec& f, double dx) {
  const int n = static_cast<int>(f.size());
  const double h2 = dx * dx;
  Vec g(n);
  g[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  for (int i = 1; i < n - 1; ++i) g[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
  g[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return g;
}

Vec b_grid_d1_transpose(const Vec& f, double dx) {
  const int n = static_cast<int>(f.size());
  Vec g(n, 0.0);
  g[0] += -3.0 * f[0] / (2.0 * dx);
  g[1] += 4.0 * f[0] / (2.0 * dx);
  g[2] += -f[0] / (2.0 * dx);
  for (int i = 1; i < n - 1; ++i) {
    g[i + 1] += f[i] / (2.0 * dx);
    g[i - 1] += -f[i] / (2.0 * dx);
  }
  g[n - 1] += 3.0 * f[n - 1] / (2.0 * dx);
  g[n - 2] += -4.0 * f[n - 1] / (2.0 * dx);
  g[n - 3] += f[n - 1] / (2.0 * dx);
  return g;
}

Vec b_grid_d2_transpose(const Vec& f, double dx) {
  const int n = static_cast<int>(f.size());
  const double h2 = dx * dx;
  Vec g(n, 0.0);
  g[0] += 2.0 * f[0] / h2;
  g[1] += -5.0 * f[0] / h2;
  g[2] += 4.0 * f[0] / h2;
  g[3] += -f[0] / h2;
  for (int i = 1; i < n - 1; ++i) {
    g[i + 1] += f[i] / h2;
    g[i] += -2.0 * f[i] / h2;
    g[i - 1] += f[i] / h2;
  }
  g[n - 1] += 2.0 * f[n - 1] / h2;
  g[n - 2] += -5.0 * f[n - 1] / h2;
  g[n - 3] += 4.0 * f[n - 1] / h2;
  g[n - 4] += -f[n - 1] / h2;
  return g;
}

void write_profile_csv(const std::string& path, const BoundaryProfile& profile,
                       const ReferenceDomain& dom) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << "x,ell\n";
  for (int i = 0; i < dom.Nx; ++i) out << to17(dom.x(i)) << "," << to17(profile.ell[i]) << "\n";
}

BoundaryProfile read_profile_csv(const std::string& path, const ReferenceDomain& dom) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,ell", 0) != 0)
    fail(ErrorKind::IoError, path + ": expected header 'x,ell'");
  BoundaryProfile p;
  p.ell0_ref = dom.ell0;
  double prev_x = -1e300;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string xs, es;
    if (!std::getline(row, xs, ',') || !std::getline(row, es))
      fail(ErrorKind::IoError, path + ": malformed row '" + line + "'");
    const double x = std::stod(xs);
    if (x <= prev_x) fail(ErrorKind::IoError, path + ": x values must ascend");
    prev_x = x;
    p.ell.push_back(std::stod(es));
  }
  if (static_cast<int>(p.ell.size()) != dom.Nx)
    fail(ErrorKind::ShapeMismatch, path + ": profile length does not match the B grid");
  return p;
}

}  // namespace aopt
