// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_ASSEMBLY_HPP
#define DAMCTL_ASSEMBLY_HPP

#include "damctl/geometry.hpp"
#include "damctl/linalg.hpp"
#include "damctl/material.hpp"

namespace damctl {

// P1 assembly on triangles. Scalar fields are vertex vectors of length m,
// vector fields are interleaved of length 2m with dof(v, d) = 2v + d.
// Nonlinear coefficients arrive as vertex values and are interpolated P1;
// every arising product-of-P1 integrand is integrated exactly.

/// scalar mass, SPD, row sums = vertex patch area / 3
SpMat assemble_mass(const TriangleMesh2D& mesh);

/// row-sum lumped scalar mass, returned as the diagonal
Vec assemble_lumped_mass(const TriangleMesh2D& mesh);

/// scalar stiffness (Laplacian), symmetric PSD with constant kernel;
/// rejects degenerate cells naming the cell index
SpMat assemble_stiffness(const TriangleMesh2D& mesh);

/// vector mass on interleaved dofs
SpMat assemble_vector_mass(const TriangleMesh2D& mesh);

/// weighted scalar mass \int w_h phi_i phi_j with P1 weight, exact cubic rule
SpMat assemble_weighted_mass(const TriangleMesh2D& mesh, const Vec& w);

/// elasticity \int coeff_h C eps(u) : eps(phi); coeff must stay nonnegative
/// at the vertices, the isotropic C comes from lame
SpMat assemble_elasticity(const TriangleMesh2D& mesh, const Vec& coeff, const LameParams& lame);

/// same bilinear form without the sign check, for linearization
/// coefficients c'(chi) chidot that may change sign
SpMat assemble_elasticity_signed(const TriangleMesh2D& mesh, const Vec& coeff,
                                 const LameParams& lame);

/// rectangular coupling (2m x m): (B q)|_(i,d) = \int w_h q_h C eps(u) : eps(phi_{i,d});
/// its transpose realizes \int w_h C eps(u) : eps(p) psi
SpMat assemble_coupling(const TriangleMesh2D& mesh, const Vec& weight, const Vec& u,
                        const LameParams& lame);

/// load vector l_j = \int w_h (C eps(u) : eps(u)) phi_j  (no 1/2 factor)
Vec assemble_coupling_load(const TriangleMesh2D& mesh, const Vec& weight, const Vec& u,
                           const LameParams& lame);

/// symmetric m x m matrix \int w_h (C eps(u) : eps(u)) phi_i phi_j  (no 1/2 factor)
SpMat assemble_strain_energy_mass(const TriangleMesh2D& mesh, const Vec& weight, const Vec& u,
                                  const LameParams& lame);

// -- boundary -------------------------------------------------------------

/// trapezoid arc weights per boundary vertex: (|e_left| + |e_right|) / 2
Vec boundary_arc_weights(const TriangleMesh2D& mesh);

/// consistent P1 edge mass on boundary vertices (scalar, nb x nb)
SpMat assemble_boundary_mass(const TriangleMesh2D& mesh);

/// traction functional \int_Gamma g_h . phi for a boundary-indexed field g
/// (length 2 nb); returns a full interleaved vector (length 2m) that is zero
/// at interior vertices
Vec assemble_boundary_load(const TriangleMesh2D& mesh, const Vec& g_boundary);

/// same functional for a full-length field; rejects fields supported on
/// interior vertices
Vec assemble_boundary_load_full(const TriangleMesh2D& mesh, const Vec& g_full);

/// contribution of one boundary edge carrying the constant traction g
Vec assemble_boundary_edge_load(const TriangleMesh2D& mesh, int edge_index, double gx, double gy);

/// restrict an interleaved field (2m) to boundary vertices (2 nb) and back
Vec restrict_to_boundary(const TriangleMesh2D& mesh, const Vec& full);
Vec extend_from_boundary(const TriangleMesh2D& mesh, const Vec& boundary);

/// component d of an interleaved vector field
Vec component(const Vec& interleaved, int d);

}  // namespace damctl

#endif
