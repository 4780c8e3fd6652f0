// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_FIELDS_HPP
#define DAMCTL_FIELDS_HPP

#include <string>

#include "damctl/geometry.hpp"
#include "damctl/linalg.hpp"

namespace damctl {

enum class FieldRole { displacement, damage, adjoint_p, adjoint_q, boundary_traction };

std::string to_string(FieldRole role);
FieldRole field_role_from_string(const std::string& name);

/// Role-tagged nodal values: one value per vertex for scalar roles, an
/// interleaved pair per vertex for vector roles; boundary tractions live on
/// the boundary vertices only.
struct NodalField {
  FieldRole role = FieldRole::damage;
  int components = 1;
  Vec values;
};

/// length check against the mesh (boundary count for tractions)
void validate_field(const TriangleMesh2D& mesh, const NodalField& field);

}  // namespace damctl

#endif
