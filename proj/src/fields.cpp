// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/fields.hpp"

namespace damctl {

std::string to_string(FieldRole role) {
  switch (role) {
    case FieldRole::displacement: return "displacement";
    case FieldRole::damage: return "damage";
    case FieldRole::adjoint_p: return "adjoint-p";
    case FieldRole::adjoint_q: return "adjoint-q";
    case FieldRole::boundary_traction: return "boundary-traction";
  }
  return "unknown";
}

FieldRole field_role_from_string(const std::string& name) {
  if (name == "displacement") return FieldRole::displacement;
  if (name == "damage") return FieldRole::damage;
  if (name == "adjoint-p") return FieldRole::adjoint_p;
  if (name == "adjoint-q") return FieldRole::adjoint_q;
  if (name == "boundary-traction") return FieldRole::boundary_traction;
  throw MeshError("unknown field role: " + name);
}

void validate_field(const TriangleMesh2D& mesh, const NodalField& field) {
  const int base = field.role == FieldRole::boundary_traction ? mesh.num_boundary_vertices()
                                                              : mesh.num_vertices();
  if (field.values.size() != static_cast<Eigen::Index>(field.components) * base)
    throw MeshError("nodal field '" + to_string(field.role) +
                    "' length does not match the mesh");
}

}  // namespace damctl
