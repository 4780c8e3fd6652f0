// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_VTK_IO_HPP
#define DAMCTL_VTK_IO_HPP

#include <string>
#include <vector>

#include "damctl/geometry.hpp"
#include "damctl/linalg.hpp"

namespace damctl {

/// One named point-data array for VTK output: scalars (per-vertex) or 2D
/// vectors (interleaved, padded with a zero z component on write).
struct VtkPointData {
  std::string name;
  int components = 1;  // 1 or 2
  Vec values;
};

/// Legacy ASCII unstructured grid (POINTS / CELLS / CELL_TYPES, type 5).
void write_vtk_mesh(const std::string& path, const TriangleMesh2D& mesh,
                    const std::vector<VtkPointData>& data = {});

TriangleMesh2D read_vtk_mesh(const std::string& path);

/// Boundary trace as a polyline grid (cell type 3) carrying per-vertex data.
void write_vtk_boundary(const std::string& path, const TriangleMesh2D& mesh,
                        const std::vector<VtkPointData>& boundary_data);

}  // namespace damctl

#endif
