// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#include "aopt/operators.hpp"

#include <cmath>

namespace aopt {

namespace {

// Shared x-part and uniform z-part entries; keeps the flat-profile case
// bit-identical between the mapped and the plain assembly.
void add_plain_row(SparseOperator& op, const ReferenceDomain& dom, int i, int j, double czz) {
  const int n = dom.idx(i, j);
  const double ax = 1.0 / (dom.dx() * dom.dx());
  op.add(n, dom.idx(i - 1, j), ax);
  op.add(n, n, -2.0 * ax);
  op.add(n, dom.idx(i + 1, j), ax);
  const int j0 = dom.j_interface();
  if (dom.has_fix() && j == j0) {
    const InterfaceStencil s = interface_zz_stencil(dom.dz_fix(), dom.dz_var());
    op.add(n, dom.idx(i, j - 1), s.a_below);
    op.add(n, n, s.a_center);
    op.add(n, dom.idx(i, j + 1), s.a_above);
  } else {
    const double dz = j < j0 ? dom.dz_fix() : dom.dz_var();
    const double az = czz / (dz * dz);
    op.add(n, dom.idx(i, j - 1), az);
    op.add(n, n, -2.0 * az);
    op.add(n, dom.idx(i, j + 1), az);
  }
}

}  // namespace

SparseOperator assemble_mapped_d2(const MappedCoefficients& coeffs) {
  const ReferenceDomain& dom = coeffs.dom;
  const int N = dom.num_nodes();
  SparseOperator op(N, N);
  const int j0 = dom.j_interface();
  const double dx = dom.dx();

  for (int i = 1; i < dom.Nx - 1; ++i) {
    for (int j = 1; j < dom.nz() - 1; ++j) {
      const int n = dom.idx(i, j);
      if (dom.has_fix() && j == j0) {
        const double ax = 1.0 / (dx * dx);
        op.add(n, dom.idx(i - 1, j), ax);
        op.add(n, n, -2.0 * ax);
        op.add(n, dom.idx(i + 1, j), ax);
        const InterfaceStencil s = interface_zz_stencil(dom.dz_fix(), coeffs.h_plus[i]);
        op.add(n, dom.idx(i, j - 1), s.a_below);
        op.add(n, n, s.a_center);
        op.add(n, dom.idx(i, j + 1), s.a_above);
        continue;
      }
      if (j < j0) {
        add_plain_row(op, dom, i, j, 1.0);
        continue;
      }
      // variable block
      const double dz = dom.dz_var();
      add_plain_row(op, dom, i, j, coeffs.c_zz[n]);
      const double cc = coeffs.c_cross[n];
      if (cc != 0.0) {
        const double a = cc / (4.0 * dx * dz);
        op.add(n, dom.idx(i + 1, j + 1), a);
        op.add(n, dom.idx(i - 1, j - 1), a);
        op.add(n, dom.idx(i + 1, j - 1), -a);
        op.add(n, dom.idx(i - 1, j + 1), -a);
      }
      const double cz = coeffs.c_z[n];
      if (cz != 0.0) {
        const double a = cz / (2.0 * dz);
        op.add(n, dom.idx(i, j + 1), a);
        op.add(n, dom.idx(i, j - 1), -a);
      }
    }
  }
  op.finalize();
  return op;
}

SparseOperator assemble_mapped_operator(const MappedCoefficients& coeffs, MappedTerm which, double c,
                                        double b) {
  const SparseOperator d2 = assemble_mapped_d2(coeffs);
  return which == MappedTerm::CSquared ? d2.scaled(c * c) : d2.scaled(b);
}

SparseOperator assemble_mapped_d2_adjoint(const MappedCoefficients& coeffs) {
  const ReferenceDomain& dom = coeffs.dom;
  const SparseOperator d2 = assemble_mapped_d2(coeffs);
  Vec w(dom.num_nodes());
  for (int i = 0; i < dom.Nx; ++i)
    for (int j = 0; j < dom.nz(); ++j) {
      const int n = dom.idx(i, j);
      w[n] = dom.wx(i) * dom.wz(j) * coeffs.vol_density[n];
    }
  SparseOperator out(d2.rows(), d2.cols());
  for (const auto& e : d2.entries()) {
    const int i = e.col / dom.nz();
    const int j = e.col % dom.nz();
    if (dom.classify(i, j) != NodeClass::Interior) continue;  // boundary rows stay with the BC closure
    out.add(e.col, e.row, e.value * w[e.row] / w[e.col]);
  }
  out.finalize();
  return out;
}

SparseOperator assemble_plain_laplacian(const ReferenceDomain& dom) {
  const int N = dom.num_nodes();
  SparseOperator op(N, N);
  const int j0 = dom.j_interface();
  for (int i = 1; i < dom.Nx - 1; ++i) {
    for (int j = 1; j < dom.nz() - 1; ++j) {
      if (dom.has_fix() && j == j0) {
        const int n = dom.idx(i, j);
        const double ax = 1.0 / (dom.dx() * dom.dx());
        op.add(n, dom.idx(i - 1, j), ax);
        op.add(n, n, -2.0 * ax);
        op.add(n, dom.idx(i + 1, j), ax);
        const InterfaceStencil s = interface_zz_stencil(dom.dz_fix(), dom.dz_var());
        op.add(n, dom.idx(i, j - 1), s.a_below);
        op.add(n, n, s.a_center);
        op.add(n, dom.idx(i, j + 1), s.a_above);
      } else {
        add_plain_row(op, dom, i, j, 1.0);
      }
    }
  }
  op.finalize();
  return op;
}

SparseOperator assemble_mapped_d2_derivative(const MappedCoefficients& coeffs,
                                             const MappedCoefficientsDerivative& dcoeffs) {
  const ReferenceDomain& dom = coeffs.dom;
  const int N = dom.num_nodes();
  SparseOperator op(N, N);
  const int j0 = dom.j_interface();
  const double dx = dom.dx();
  const double dz = dom.dz_var();

  for (int i = 1; i < dom.Nx - 1; ++i) {
    for (int j = 1; j < dom.nz() - 1; ++j) {
      const int n = dom.idx(i, j);
      if (dom.has_fix() && j == j0) {
        const InterfaceStencil s =
            interface_zz_stencil_derivative(dom.dz_fix(), coeffs.h_plus[i], dcoeffs.d_h_plus[i]);
        op.add(n, dom.idx(i, j - 1), s.a_below);
        op.add(n, n, s.a_center);
        op.add(n, dom.idx(i, j + 1), s.a_above);
        continue;
      }
      if (j < j0) continue;
      const double dzz = dcoeffs.d_c_zz[n];
      if (dzz != 0.0) {
        const double a = dzz / (dz * dz);
        op.add(n, dom.idx(i, j - 1), a);
        op.add(n, n, -2.0 * a);
        op.add(n, dom.idx(i, j + 1), a);
      }
      const double dcc = dcoeffs.d_c_cross[n];
      if (dcc != 0.0) {
        const double a = dcc / (4.0 * dx * dz);
        op.add(n, dom.idx(i + 1, j + 1), a);
        op.add(n, dom.idx(i - 1, j - 1), a);
        op.add(n, dom.idx(i + 1, j - 1), -a);
        op.add(n, dom.idx(i - 1, j + 1), -a);
      }
      const double dcz = dcoeffs.d_c_z[n];
      if (dcz != 0.0) {
        const double a = dcz / (2.0 * dz);
        op.add(n, dom.idx(i, j + 1), a);
        op.add(n, dom.idx(i, j - 1), -a);
      }
    }
  }
  op.finalize();
  return op;
}

SparseOperator assemble_plate_bilaplacian(const ReferenceDomain& dom) {
  const int n = dom.plate_nodes();
  if (n < 5) fail(ErrorKind::GridTooCoarse, "plate needs at least 5 nodes");
  const double h4 = std::pow(dom.dx(), 4);
  SparseOperator op(n, n);
  op.add(0, 0, 1.0);
  op.add(n - 1, n - 1, 1.0);
  for (int i = 1; i < n - 1; ++i) {
    if (i == 1) {
      op.add(i, 0, -2.0 / h4);
      op.add(i, 1, 5.0 / h4);
      op.add(i, 2, -4.0 / h4);
      op.add(i, 3, 1.0 / h4);
    } else if (i == n - 2) {
      op.add(i, n - 1, -2.0 / h4);
      op.add(i, n - 2, 5.0 / h4);
      op.add(i, n - 3, -4.0 / h4);
      op.add(i, n - 4, 1.0 / h4);
    } else {
      op.add(i, i - 2, 1.0 / h4);
      op.add(i, i - 1, -4.0 / h4);
      op.add(i, i, 6.0 / h4);
      op.add(i, i + 1, -4.0 / h4);
      op.add(i, i + 2, 1.0 / h4);
    }
  }
  op.finalize();
  return op;
}

SparseOperator assemble_plate_fractional(const ReferenceDomain& dom, double exponent) {
  const int n = dom.plate_nodes();
  const int m = n - 2;  // interior modes
  const double h = dom.dx();
  const double L = dom.Lx;
  SparseOperator op(n, n);
  std::vector<double> lam(m), norm(m);
  for (int k = 1; k <= m; ++k) lam[k - 1] = (2.0 - 2.0 * std::cos(k * M_PI * h / L)) / (h * h);
  for (int r = 1; r < n - 1; ++r) {
    for (int c = 1; c < n - 1; ++c) {
      double v = 0.0;
      for (int k = 1; k <= m; ++k) {
        v += std::pow(lam[k - 1], exponent) * std::sin(k * M_PI * r * h / L) *
             std::sin(k * M_PI * c * h / L);
      }
      op.add(r, c, v * 2.0 / (n - 1));
    }
  }
  op.finalize();
  return op;
}

Vec conormal_trace(const Vec& field, const MappedCoefficients& coeffs, Edge edge) {
  const ReferenceDomain& dom = coeffs.dom;
  check_shape(static_cast<int>(field.size()) == dom.num_nodes(), "conormal_trace");
  const double dx = dom.dx();
  const int nz = dom.nz();
  const int J = nz - 1;

  switch (edge) {
    case Edge::Top: {
      Vec out(dom.Nx, 0.0);
      const double dz = dom.dz_var();
      for (int i = 0; i < dom.Nx; ++i) {
        double fx;
        if (i == 0)
          fx = (-3.0 * field[dom.idx(0, J)] + 4.0 * field[dom.idx(1, J)] - field[dom.idx(2, J)]) /
               (2.0 * dx);
        else if (i == dom.Nx - 1)
          fx = (3.0 * field[dom.idx(i, J)] - 4.0 * field[dom.idx(i - 1, J)] +
                field[dom.idx(i - 2, J)]) /
               (2.0 * dx);
        else
          fx = (field[dom.idx(i + 1, J)] - field[dom.idx(i - 1, J)]) / (2.0 * dx);
        const double fz = (3.0 * field[dom.idx(i, J)] - 4.0 * field[dom.idx(i, J - 1)] +
                           field[dom.idx(i, J - 2)]) /
                          (2.0 * dz);
        out[i] = coeffs.tau_x[i] * fx + coeffs.tau_z[i] * fz;
      }
      return out;
    }
    case Edge::Bottom: {
      Vec out(dom.Nx, 0.0);
      const double dz = dom.dz_above(0);
      for (int i = 0; i < dom.Nx; ++i) {
        out[i] = (3.0 * field[dom.idx(i, 0)] - 4.0 * field[dom.idx(i, 1)] + field[dom.idx(i, 2)]) /
                 (2.0 * dz);
      }
      return out;
    }
    case Edge::Left: {
      Vec out(nz, 0.0);
      for (int j = 0; j < nz; ++j)
        out[j] =
            (3.0 * field[dom.idx(0, j)] - 4.0 * field[dom.idx(1, j)] + field[dom.idx(2, j)]) / (2.0 * dx);
      return out;
    }
    case Edge::Right: {
      Vec out(nz, 0.0);
      for (int j = 0; j < nz; ++j)
        out[j] = (3.0 * field[dom.idx(dom.Nx - 1, j)] - 4.0 * field[dom.idx(dom.Nx - 2, j)] +
                  field[dom.idx(dom.Nx - 3, j)]) /
                 (2.0 * dx);
      return out;
    }
  }
  fail(ErrorKind::UnknownEdge, "unknown edge");
}

}  // namespace aopt
