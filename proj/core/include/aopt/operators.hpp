// Copyright (c) the aopt contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aopt/mapping.hpp"
#include "aopt/sparse.hpp"

namespace aopt {

enum class MappedTerm { CSquared, Damping };

/// Interior rows of the pulled-back Laplacian, scaled by c^2 or b. Boundary
/// rows are left empty; the solvers close them with their boundary rows.
SparseOperator assemble_mapped_operator(const MappedCoefficients& coeffs, MappedTerm which, double c,
                                        double b);

/// Unscaled pulled-back Laplacian D2 (interior rows only).
SparseOperator assemble_mapped_d2(const MappedCoefficients& coeffs);

/// Weighted transpose of the pulled-back Laplacian: the adjoint of D2 with
/// respect to the physical volume pairing, restricted to interior rows.
/// This is the operator the backward solver applies.
SparseOperator assemble_mapped_d2_adjoint(const MappedCoefficients& coeffs);

/// Plain second-order Laplacian on the reference grid, same row layout as the
/// mapped operator; used as the flat-profile cross-check.
SparseOperator assemble_plain_laplacian(const ReferenceDomain& dom);

/// Directional derivative of the mapped D2 with respect to the profile,
/// as an operator (interior rows only).
SparseOperator assemble_mapped_d2_derivative(const MappedCoefficients& coeffs,
                                             const MappedCoefficientsDerivative& dcoeffs);

/// 1D fourth-difference plate operator with hinged ends (value and second
/// difference vanish). End rows are identities on the displacement.
SparseOperator assemble_plate_bilaplacian(const ReferenceDomain& dom);

/// Spectral power of the 1D hinged (Dirichlet) negative second difference on
/// the plate grid, as a dense-in-band operator; used for optional damping.
SparseOperator assemble_plate_fractional(const ReferenceDomain& dom, double exponent);

/// Boundary normal-derivative extraction. On the top edge this is the
/// conormal tau . grad_ref, which equals the physical normal derivative on
/// the deformed boundary; on the other edges the plain outward difference.
/// Returns one value per node of the edge's grid line.
Vec conormal_trace(const Vec& field, const MappedCoefficients& coeffs, Edge edge);

}  // namespace aopt
