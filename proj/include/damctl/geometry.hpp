// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_GEOMETRY_HPP
#define DAMCTL_GEOMETRY_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace damctl {

class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

/// One edge of the polygonal boundary, oriented so the owning cell lies on
/// its left; the stored normal is the outward unit normal.
struct BoundaryEdge {
  int a = -1;
  int b = -1;
  int cell = -1;
  double nx = 0.0;
  double ny = 0.0;
  double length = 0.0;
};

/// Conforming triangle mesh with counterclockwise cells. The boundary
/// structures are derived from the connectivity and kept consistent by
/// rebuild_boundary().
class TriangleMesh2D {
public:
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> cells;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> boundary_vertex_ids;  // sorted

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_boundary_vertices() const { return static_cast<int>(boundary_vertex_ids.size()); }

  double signed_cell_area(int c) const;
  double total_area() const;

  /// Derives boundary_edges and boundary_vertex_ids from the cells and
  /// refreshes the vertex -> boundary-index map.
  void rebuild_boundary();

  /// Checks mesh invariants: positive cell areas, every boundary edge owned
  /// by exactly one cell, unit outward normals, boundary edges forming
  /// closed loops that cover the whole boundary. Throws MeshError.
  void validate() const;

  /// boundary index of a vertex, -1 for interior vertices
  int boundary_index(int vertex) const { return boundary_index_[static_cast<size_t>(vertex)]; }
  const std::vector<int>& boundary_index_map() const { return boundary_index_; }

private:
  std::vector<int> boundary_index_;
};

/// Uniform criss-cross triangulation of a rectangle: n x n squares, each
/// split into two triangles. 2 n^2 cells, (n+1)^2 vertices, 4 n boundary
/// edges. Rejects n < 1.
TriangleMesh2D build_structured_mesh(int n, const Rect& domain = {});

/// Mesh from raw vertex/cell lists; boundary structures are rebuilt and the
/// result validated.
TriangleMesh2D make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> cells);

}  // namespace damctl

#endif
