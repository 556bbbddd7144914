// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <random>

#include "aopt/mapping.hpp"
#include "doctest.h"

using namespace aopt;

namespace {

ReferenceDomain small_domain(int nx = 17, int nz_fix = 5, int nz_var = 13) {
  ReferenceDomain dom;
  dom.Lx = 1.0;
  dom.H_fix = 0.25;
  dom.ell0 = 1.0;
  dom.Nx = nx;
  dom.Nz_fix = nz_fix;
  dom.Nz_var = nz_var;
  return dom;
}

BoundaryProfile clamped_bump(const ReferenceDomain& dom, double amp) {
  BoundaryProfile p = constant_profile(dom);
  for (int i = 2; i < dom.Nx - 2; ++i) {
    const double xf = static_cast<double>(i) / (dom.Nx - 1);
    p.ell[i] += amp * std::pow(std::sin(M_PI * xf), 4);
  }
  return p;
}

}  // namespace

TEST_CASE("constant profile is admissible") {
  const ReferenceDomain dom = small_domain();
  const BoundaryProfile p = constant_profile(dom);
  const AdmissibilityReport rep = validate_profile(p, dom);
  CHECK(rep.admissible());
}

TEST_CASE("closeness violation is reported, not thrown") {
  ReferenceDomain dom = small_domain();
  BoundaryProfile p = constant_profile(dom);
  for (double& v : p.ell) v = 1.6;
  const AdmissibilityReport rep = validate_profile(p, dom);
  CHECK_FALSE(rep.close);
  CHECK(rep.positive);
  CHECK(rep.max_deviation == doctest::Approx(0.6));
}

TEST_CASE("interior bump with clamped ends is admissible") {
  const ReferenceDomain dom = small_domain();
  const BoundaryProfile p = clamped_bump(dom, 0.1);
  CHECK(validate_profile(p, dom).admissible());
}

TEST_CASE("identity transform at the reference profile") {
  const ReferenceDomain dom = small_domain();
  const MappedCoefficients mc = transform_coefficients(constant_profile(dom), dom);
  for (int n = 0; n < dom.num_nodes(); ++n) {
    CHECK(mc.inv_omega0[n] == 1.0);
    CHECK(mc.m12[n] == 0.0);
    CHECK(mc.m22[n] == 1.0);
    CHECK(mc.c_zz[n] == 1.0);
    CHECK(mc.c_cross[n] == 0.0);
    CHECK(mc.c_z[n] == 0.0);
  }
  for (int i = 0; i < dom.Nx; ++i) {
    CHECK(mc.omega1[i] == 1.0);
    CHECK(mc.tau_x[i] == 0.0);
    CHECK(mc.tau_z[i] == 1.0);
  }
}

TEST_CASE("constant stretch gives the exact densities") {
  const ReferenceDomain dom = small_domain();
  BoundaryProfile p = constant_profile(dom);
  for (double& v : p.ell) v = 1.25;
  const MappedCoefficients mc = transform_coefficients(p, dom);
  const int j_var = dom.j_interface() + 2;
  const int n = dom.idx(dom.Nx / 2, j_var);
  CHECK(mc.inv_omega0[n] == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(mc.m22[n] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(mc.m12[n] == doctest::Approx(0.0));
  CHECK(mc.omega1[dom.Nx / 2] == doctest::Approx(1.0));
  // fixed block untouched
  const int n_fix = dom.idx(dom.Nx / 2, 1);
  CHECK(mc.inv_omega0[n_fix] == 1.0);
  CHECK(mc.m22[n_fix] == 1.0);
}

TEST_CASE("affine profile matches the symbolic off-diagonal entry") {
  // ell = 1 + 0.1 x with the closed-form M12 = -z 0.1 / (1 + 0.1 x).
  ReferenceDomain dom = small_domain();
  BoundaryProfile p = constant_profile(dom);
  for (int i = 0; i < dom.Nx; ++i) p.ell[i] = 1.0 + 0.1 * dom.x(i);
  const MappedCoefficients mc = transform_coefficients(p, dom);
  for (int i = 1; i < dom.Nx - 1; ++i) {
    for (int j = dom.j_interface() + 1; j < dom.nz(); ++j) {
      const double zh = dom.zhat(j);
      const double expect = -zh * 0.1 / (1.0 + 0.1 * dom.x(i));
      CHECK(mc.m12[dom.idx(i, j)] == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("coefficient derivative: zero direction and constant shift") {
  const ReferenceDomain dom = small_domain();
  const BoundaryProfile p = constant_profile(dom);
  const Vec zero(dom.Nx, 0.0);
  const MappedCoefficientsDerivative d0 = coefficient_derivative(p, zero, dom);
  for (double v : d0.d_inv_omega0) CHECK(v == 0.0);
  for (double v : d0.d_m22) CHECK(v == 0.0);

  // interior direction approximating a constant: check the closed forms
  Vec de(dom.Nx, 1.0);
  de[0] = de[dom.Nx - 1] = 0.0;
  const MappedCoefficientsDerivative d1 = coefficient_derivative(p, de, dom);
  const int n = dom.idx(dom.Nx / 2, dom.j_interface() + 2);
  CHECK(d1.d_inv_omega0[n] == doctest::Approx(1.0));
  CHECK(d1.d_m22[n] == doctest::Approx(-1.0));
}

TEST_CASE("coefficient derivative matches finite differences of the transform") {
  const ReferenceDomain dom = small_domain();
  const BoundaryProfile p = clamped_bump(dom, 0.08);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vec de(dom.Nx, 0.0);
  for (int i = 2; i < dom.Nx - 2; ++i)
    de[i] = uni(rng) * std::pow(std::sin(M_PI * i / double(dom.Nx - 1)), 2);

  const MappedCoefficientsDerivative dc = coefficient_derivative(p, de, dom);

  double prev_err = 1e300;
  for (const double tau : {1e-2, 1e-3, 1e-4}) {
    BoundaryProfile pp = p;
    for (int i = 0; i < dom.Nx; ++i) pp.ell[i] += tau * de[i];
    const MappedCoefficients m1 = transform_coefficients(pp, dom);
    const MappedCoefficients m0 = transform_coefficients(p, dom);
    double err = 0.0;
    for (int n = 0; n < dom.num_nodes(); ++n) {
      err = std::max(err, std::abs((m1.inv_omega0[n] - m0.inv_omega0[n]) / tau - dc.d_inv_omega0[n]));
      err = std::max(err, std::abs((m1.m12[n] - m0.m12[n]) / tau - dc.d_m12[n]));
      err = std::max(err, std::abs((m1.c_zz[n] - m0.c_zz[n]) / tau - dc.d_c_zz[n]));
      err = std::max(err, std::abs((m1.c_cross[n] - m0.c_cross[n]) / tau - dc.d_c_cross[n]));
      err = std::max(err, std::abs((m1.c_z[n] - m0.c_z[n]) / tau - dc.d_c_z[n]));
    }
    for (int i = 0; i < dom.Nx; ++i) {
      err = std::max(err, std::abs((m1.omega1[i] - m0.omega1[i]) / tau - dc.d_omega1[i]));
      err = std::max(err, std::abs((m1.tau_x[i] - m0.tau_x[i]) / tau - dc.d_tau_x[i]));
      err = std::max(err, std::abs((m1.tau_z[i] - m0.tau_z[i]) / tau - dc.d_tau_z[i]));
    }
    CHECK(err < prev_err * 0.2);  // first order in tau
    prev_err = err;
  }
}

TEST_CASE("perturbation with nonzero endpoint trace is rejected") {
  const ReferenceDomain dom = small_domain();
  Vec de(dom.Nx, 0.0);
  de[0] = 1.0;
  CHECK_THROWS_AS(coefficient_derivative(constant_profile(dom), de, dom), Error);
}

TEST_CASE("boundary geometry of flat, parabolic and affine profiles") {
  const ReferenceDomain dom = small_domain(41, 5, 13);
  SUBCASE("flat") {
    const BoundaryGeometry bg = boundary_geometry(constant_profile(dom), dom);
    for (int i = 0; i < dom.Nx; ++i) {
      CHECK(bg.sigma[i] == 1.0);
      CHECK(bg.nu_x[i] == 0.0);
      CHECK(bg.nu_z[i] == 1.0);
      CHECK(bg.curvature[i] == 0.0);
    }
  }
  SUBCASE("parabola x^2/2 at the left end") {
    BoundaryProfile p = constant_profile(dom);
    for (int i = 0; i < dom.Nx; ++i) p.ell[i] = 1.0 + 0.5 * dom.x(i) * dom.x(i);
    const BoundaryGeometry bg = boundary_geometry(p, dom);
    CHECK(bg.sigma[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(bg.curvature[0] == doctest::Approx(-1.0).epsilon(2e-2));
  }
  SUBCASE("affine slope has zero curvature") {
    BoundaryProfile p = constant_profile(dom);
    for (int i = 0; i < dom.Nx; ++i) p.ell[i] = 2.0 + 0.3 * dom.x(i);
    p.ell0_ref = 2.0;
    const BoundaryGeometry bg = boundary_geometry(p, dom);
    for (int i = 1; i < dom.Nx - 1; ++i) CHECK(std::abs(bg.curvature[i]) < 1e-10);
    CHECK(bg.sigma[5] == doctest::Approx(std::sqrt(1.09)).epsilon(1e-10));
  }
}

TEST_CASE("mapped volume and surface quadrature converge at second order") {
  // ell = 1 + amp x^3 (1-x)^3: clamped ends with a genuine quadrature error
  const double amp = 0.9;
  const auto shape = [&](double x) { return std::pow(x, 3) * std::pow(1.0 - x, 3); };
  const auto slope = [&](double x) {
    return 3.0 * x * x * std::pow(1.0 - x, 3) - 3.0 * std::pow(x, 3) * std::pow(1.0 - x, 2);
  };
  // closed form: int_0^1 x^3 (1-x)^3 dx = 1/140
  const auto area_exact = [&](const ReferenceDomain& dom) {
    return 1.0 + amp / 140.0 + dom.Lx * dom.H_fix;
  };
  const auto surface_exact = [&]() {
    const int M = 400001;
    double acc = 0.0;
    for (int m = 0; m < M; ++m) {
      const double x = static_cast<double>(m) / (M - 1);
      const double w = (m == 0 || m == M - 1) ? 0.5 : 1.0;
      const double s = amp * slope(x);
      acc += w * std::sqrt(1.0 + s * s);
    }
    return acc / (M - 1);
  };

  double prev_vol_err = 0.0, prev_surf_err = 0.0;
  int level = 0;
  for (const int nx : {33, 65}) {
    ReferenceDomain dom = small_domain(nx, (nx - 1) / 4 + 1, (nx - 1) + 1);
    BoundaryProfile p = constant_profile(dom);
    for (int i = 0; i < dom.Nx; ++i) p.ell[i] = 1.0 + amp * shape(dom.x(i));
    const MappedCoefficients mc = transform_coefficients(p, dom);
    double vol = 0.0;
    for (int i = 0; i < dom.Nx; ++i)
      for (int j = 0; j < dom.nz(); ++j)
        vol += dom.wx(i) * dom.wz(j) * mc.vol_density[dom.idx(i, j)];
    double surf = 0.0;
    for (int i = 0; i < dom.Nx; ++i) surf += dom.wx(i) * mc.omega1[i];
    const double vol_err = std::abs(vol - area_exact(dom));
    const double surf_err = std::abs(surf - surface_exact());
    if (level == 1) {
      CHECK(vol_err < std::max(prev_vol_err / 3.5, 1e-12));  // observed order >= 2
      CHECK(surf_err < std::max(prev_surf_err / 3.5, 1e-12));
    }
    prev_vol_err = vol_err;
    prev_surf_err = surf_err;
    ++level;
  }
}

TEST_CASE("profile CSV round trip") {
  const ReferenceDomain dom = small_domain();
  const BoundaryProfile p = clamped_bump(dom, 0.07);
  const std::string path = "test_profile_roundtrip.csv";
  write_profile_csv(path, p, dom);
  const BoundaryProfile q = read_profile_csv(path, dom);
  for (int i = 0; i < dom.Nx; ++i) CHECK(q.ell[i] == p.ell[i]);
  std::remove(path.c_str());
}

TEST_CASE("pull-back grid transport round trip is exact") {
  // the physical grid is the image of the reference grid; transporting nodal
  // values is index-preserving both ways
  const ReferenceDomain dom = small_domain();
  const BoundaryProfile p = clamped_bump(dom, 0.1);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vec field(dom.num_nodes());
  for (double& v : field) v = uni(rng);
  // push forward: value at physical node (x, z(ell) ) equals reference value;
  // pull back: identical indexing
  Vec physical = field;
  Vec back = physical;
  for (int n = 0; n < dom.num_nodes(); ++n) CHECK(back[n] == field[n]);
}
