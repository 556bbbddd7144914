// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <random>

#include "aopt/fractional.hpp"
#include "aopt/operators.hpp"
#include "doctest.h"

using namespace aopt;

namespace {

ReferenceDomain make_domain(int nx, int nz_fix, int nz_var) {
  ReferenceDomain dom;
  dom.Lx = 1.0;
  dom.H_fix = nz_fix > 0 ? 0.25 : 0.0;
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

TEST_CASE("flat profile reproduces the plain 5-point stencil exactly") {
  const ReferenceDomain dom = make_domain(17, 5, 13);
  const MappedCoefficients mc = transform_coefficients(constant_profile(dom), dom);
  const SparseOperator mapped = assemble_mapped_d2(mc);
  const SparseOperator plain = assemble_plain_laplacian(dom);
  REQUIRE(mapped.entries().size() == plain.entries().size());
  for (size_t k = 0; k < mapped.entries().size(); ++k) {
    CHECK(mapped.entries()[k].row == plain.entries()[k].row);
    CHECK(mapped.entries()[k].col == plain.entries()[k].col);
    CHECK(mapped.entries()[k].value == plain.entries()[k].value);
  }
}

TEST_CASE("constants lie in the kernel of the mapped operator") {
  const ReferenceDomain dom = make_domain(17, 5, 13);
  const MappedCoefficients mc = transform_coefficients(clamped_bump(dom, 0.15), dom);
  const SparseOperator d2 = assemble_mapped_d2(mc);
  const Vec ones(dom.num_nodes(), 1.0);
  const Vec y = d2.apply(ones);
  for (double v : y) CHECK(std::abs(v) < 1e-11);
}

TEST_CASE("manufactured quadratic pulled back gives Laplacian 4 at second order") {
  // phi(x, z) = x^2 + z^2 on the deformed domain; the pull-back evaluates phi
  // at z = zhat ell / ell0 in the variable block.
  double prev = 0.0;
  int level = 0;
  for (const int nx : {17, 33, 65}) {
    const ReferenceDomain dom = make_domain(nx, (nx - 1) / 4 + 1, nx);
    const BoundaryProfile prof = clamped_bump(dom, 0.2);
    const MappedCoefficients mc = transform_coefficients(prof, dom);
    const SparseOperator d2 = assemble_mapped_d2(mc);
    Vec phi(dom.num_nodes());
    for (int i = 0; i < dom.Nx; ++i) {
      for (int j = 0; j < dom.nz(); ++j) {
        const double zh = dom.zhat(j);
        const double z = zh <= 0.0 ? zh : zh * prof.ell[i] / prof.ell0_ref;
        const double x = dom.x(i);
        phi[dom.idx(i, j)] = x * x + z * z;
      }
    }
    const Vec y = d2.apply(phi);
    double err = 0.0;
    for (int i = 1; i < dom.Nx - 1; ++i)
      for (int j = 1; j < dom.nz() - 1; ++j)
        err = std::max(err, std::abs(y[dom.idx(i, j)] - 4.0));
    if (level > 0) CHECK(err < prev / 3.0);
    prev = err;
    ++level;
  }
}

TEST_CASE("assemble_mapped_operator scales by the requested physics factor") {
  const ReferenceDomain dom = make_domain(9, 3, 7);
  const MappedCoefficients mc = transform_coefficients(clamped_bump(dom, 0.1), dom);
  const SparseOperator c_term = assemble_mapped_operator(mc, MappedTerm::CSquared, 3.0, 0.5);
  const SparseOperator b_term = assemble_mapped_operator(mc, MappedTerm::Damping, 3.0, 0.5);
  const SparseOperator d2 = assemble_mapped_d2(mc);
  for (size_t k = 0; k < d2.entries().size(); ++k) {
    CHECK(c_term.entries()[k].value == doctest::Approx(9.0 * d2.entries()[k].value));
    CHECK(b_term.entries()[k].value == doctest::Approx(0.5 * d2.entries()[k].value));
  }
}

TEST_CASE("assembly is deterministic") {
  const ReferenceDomain dom = make_domain(17, 5, 13);
  const MappedCoefficients mc = transform_coefficients(clamped_bump(dom, 0.12), dom);
  const SparseOperator a = assemble_mapped_d2(mc);
  const SparseOperator b = assemble_mapped_d2(mc);
  REQUIRE(a.entries().size() == b.entries().size());
  for (size_t k = 0; k < a.entries().size(); ++k) {
    CHECK(a.entries()[k].row == b.entries()[k].row);
    CHECK(a.entries()[k].col == b.entries()[k].col);
    CHECK(a.entries()[k].value == b.entries()[k].value);
  }
}

TEST_CASE("weighted transpose pairing identity") {
  const ReferenceDomain dom = make_domain(17, 5, 13);
  const MappedCoefficients mc = transform_coefficients(clamped_bump(dom, 0.15), dom);
  const SparseOperator d2 = assemble_mapped_d2(mc);
  const SparseOperator d2t = d2.transposed();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vec u(dom.num_nodes(), 0.0), v(dom.num_nodes(), 0.0);
  for (int i = 2; i < dom.Nx - 2; ++i)
    for (int j = 2; j < dom.nz() - 2; ++j) {
      u[dom.idx(i, j)] = uni(rng);
      v[dom.idx(i, j)] = uni(rng);
    }
  Vec wv(dom.num_nodes());
  for (int i = 0; i < dom.Nx; ++i)
    for (int j = 0; j < dom.nz(); ++j) {
      const int n = dom.idx(i, j);
      wv[n] = dom.wx(i) * dom.wz(j) * mc.vol_density[n] * v[n];
    }
  const Vec au = d2.apply(u);
  double lhs = 0.0;
  for (int n = 0; n < dom.num_nodes(); ++n) lhs += au[n] * wv[n];
  const Vec atwv = d2t.apply(wv);
  double rhs = 0.0;
  for (int n = 0; n < dom.num_nodes(); ++n) rhs += u[n] * atwv[n];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("plate operator: hinged eigenpairs, symmetry, zero field") {
  ReferenceDomain dom = make_domain(65, 0, 65);
  const SparseOperator plate = assemble_plate_bilaplacian(dom);

  SUBCASE("zero maps to zero") {
    const Vec zero(dom.plate_nodes(), 0.0);
    for (double v : plate.apply(zero)) CHECK(v == 0.0);
  }
  SUBCASE("sine modes are discrete eigenvectors") {
    const int n = dom.plate_nodes();
    const double L = dom.Lx;
    for (int kmode = 1; kmode <= 3; ++kmode) {
      Vec mode(n, 0.0);
      for (int i = 0; i < n; ++i) mode[i] = std::sin(kmode * M_PI * dom.x(i) / L);
      const Vec y = plate.apply(mode);
      double num = 0.0, den = 0.0;
      for (int i = 1; i < n - 1; ++i) {
        num += y[i] * mode[i];
        den += mode[i] * mode[i];
      }
      const double lam = num / den;
      const double exact = std::pow(kmode * M_PI / L, 4);
      CHECK(std::abs(lam - exact) / exact < 5e-3);
    }
  }
  SUBCASE("symmetric on hinged fields") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int n = dom.plate_nodes();
    Vec u(n, 0.0), v(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
      u[i] = uni(rng);
      v[i] = uni(rng);
    }
    const Vec au = plate.apply(u);
    const Vec av = plate.apply(v);
    double uv = 0.0, vu = 0.0;
    for (int i = 1; i < n - 1; ++i) {
      uv += au[i] * v[i];
      vu += u[i] * av[i];
    }
    CHECK(uv == doctest::Approx(vu).epsilon(1e-12));
  }
  SUBCASE("too coarse grid is rejected") {
    ReferenceDomain tiny = dom;
    tiny.Nx = 4;
    CHECK_THROWS_AS(assemble_plate_bilaplacian(tiny), Error);
  }
}

TEST_CASE("fractional powers of the Neumann second difference") {
  const int n = 17;
  const NeumannSpectrum spec(n, 1.0);

  SUBCASE("constants are fixed points for any exponent") {
    const Vec c0(n, 3.25);
    for (const double s : {0.5, 1.5, -0.75}) {
      const Vec y = spec.apply(c0, s);
      for (double v : y) CHECK(v == doctest::Approx(3.25).epsilon(1e-9));
    }
  }
  SUBCASE("zero exponent is the identity") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vec f(n);
    for (double& v : f) v = uni(rng);
    FractionalSpec fs;
    fs.s = 0.0;
    fs.nodes = n;
    fs.length = 1.0;
    const Vec y = fractional_neumann_apply(f, fs);
    for (int i = 0; i < n; ++i) CHECK(y[i] == f[i]);
  }
  SUBCASE("apply(s) then apply(-s) is the identity to 1e-10") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vec f(n);
    for (double& v : f) v = uni(rng);
    const Vec y = spec.apply(spec.apply(f, 1.5), -1.5);
    for (int i = 0; i < n; ++i) CHECK(std::abs(y[i] - f[i]) < 1e-10);
  }
  SUBCASE("matches a dense eigendecomposition oracle") {
    // symmetrize with the square root of the trapezoid weights
    const double dx = 1.0 / (n - 1);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      if (i == 0) {
        L(0, 0) = 2.0 / (dx * dx);
        L(0, 1) = -2.0 / (dx * dx);
      } else if (i == n - 1) {
        L(n - 1, n - 1) = 2.0 / (dx * dx);
        L(n - 1, n - 2) = -2.0 / (dx * dx);
      } else {
        L(i, i - 1) = -1.0 / (dx * dx);
        L(i, i) = 2.0 / (dx * dx);
        L(i, i + 1) = -1.0 / (dx * dx);
      }
    }
    Eigen::VectorXd wsqrt(n);
    for (int i = 0; i < n; ++i) wsqrt(i) = std::sqrt(i == 0 || i == n - 1 ? 0.5 : 1.0);
    const Eigen::MatrixXd sym =
        wsqrt.asDiagonal() * L * Eigen::MatrixXd(wsqrt.asDiagonal()).inverse();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    REQUIRE(eig.info() == Eigen::Success);
    const double s = 0.8;
    Eigen::VectorXd powed = eig.eigenvalues();
    for (int i = 0; i < n; ++i) powed(i) = std::pow(std::max(0.0, powed(i)) + 1.0, s);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(wsqrt.asDiagonal()).inverse() *
                                  eig.eigenvectors() * powed.asDiagonal() *
                                  eig.eigenvectors().transpose() * wsqrt.asDiagonal();
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vec f(n);
    for (double& v : f) v = uni(rng);
    Eigen::Map<const Eigen::VectorXd> fe(f.data(), n);
    const Eigen::VectorXd oracle = dense * fe;
    const Vec mine = spec.apply(f, s);
    for (int i = 0; i < n; ++i) CHECK(std::abs(mine[i] - oracle(i)) < 1e-10);
  }
  SUBCASE("cosine mode scales by its eigenvalue power") {
    const int kmode = 5;
    Vec mode(n);
    for (int i = 0; i < n; ++i) mode[i] = std::cos(kmode * M_PI * i / (n - 1));
    const double s = 1.25;
    const Vec y = spec.apply(mode, s);
    const double factor = std::pow(spec.eigenvalues()[kmode] + 1.0, s);
    for (int i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(factor * mode[i]).epsilon(1e-10));
  }
}

TEST_CASE("conormal traces") {
  const ReferenceDomain dom = make_domain(33, 9, 25);

  SUBCASE("constants give zero on every edge") {
    const MappedCoefficients mc = transform_coefficients(clamped_bump(dom, 0.2), dom);
    const Vec c0(dom.num_nodes(), 2.5);
    for (const Edge e : {Edge::Top, Edge::Bottom, Edge::Left, Edge::Right}) {
      for (double v : conormal_trace(c0, mc, e)) CHECK(std::abs(v) < 1e-11);
    }
  }
  SUBCASE("flat profile, field = z") {
    const MappedCoefficients mc = transform_coefficients(constant_profile(dom), dom);
    Vec f(dom.num_nodes());
    for (int i = 0; i < dom.Nx; ++i)
      for (int j = 0; j < dom.nz(); ++j) f[dom.idx(i, j)] = dom.zhat(j);
    const Vec top = conormal_trace(f, mc, Edge::Top);
    const Vec bottom = conormal_trace(f, mc, Edge::Bottom);
    for (int i = 1; i < dom.Nx - 1; ++i) {
      CHECK(top[i] == doctest::Approx(1.0).epsilon(1e-11));
      CHECK(bottom[i] == doctest::Approx(-1.0).epsilon(1e-11));
    }
  }
  SUBCASE("deformed profile reproduces the analytic normal derivative") {
    // physical phi = a x + b z; on the graph boundary
    // d_nu phi = (-ell' a + b) / sigma
    const double a = 0.7, b = -0.4;
    double prev = 0.0;
    int level = 0;
    for (const int nx : {33, 65}) {
      const ReferenceDomain d2 = make_domain(nx, (nx - 1) / 4 + 1, nx);
      const BoundaryProfile prof = clamped_bump(d2, 0.2);
      const MappedCoefficients mc = transform_coefficients(prof, d2);
      Vec f(d2.num_nodes());
      for (int i = 0; i < d2.Nx; ++i)
        for (int j = 0; j < d2.nz(); ++j) {
          const double zh = d2.zhat(j);
          const double z = zh <= 0.0 ? zh : zh * prof.ell[i] / prof.ell0_ref;
          f[d2.idx(i, j)] = a * d2.x(i) + b * z;
        }
      const Vec top = conormal_trace(f, mc, Edge::Top);
      const Vec grad_ell = b_grid_d1(prof.ell, d2.dx());
      double err = 0.0;
      for (int i = 1; i < d2.Nx - 1; ++i) {
        const double sig = std::sqrt(1.0 + grad_ell[i] * grad_ell[i]);
        const double exact = (-grad_ell[i] * a + b) / sig;
        err = std::max(err, std::abs(top[i] - exact));
      }
      if (level > 0) CHECK(err < std::max(prev / 3.0, 1e-12));
      prev = err;
      ++level;
    }
  }
  SUBCASE("edge tag parsing") {
    CHECK(edge_from_string("top") == Edge::Top);
    CHECK_THROWS_AS(edge_from_string("north"), Error);
  }
}

TEST_CASE("operator dump writes a coordinate list") {
  const ReferenceDomain dom = make_domain(9, 3, 7);
  const MappedCoefficients mc = transform_coefficients(constant_profile(dom), dom);
  const SparseOperator d2 = assemble_mapped_d2(mc);
  const std::string path = "test_operator_dump.csv";
  d2.dump_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "row,col,value");
  std::remove(path.c_str());
}
