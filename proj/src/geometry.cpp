// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace damctl {

double TriangleMesh2D::signed_cell_area(int c) const {
  const auto& t = cells[static_cast<size_t>(c)];
  const Point2& a = vertices[static_cast<size_t>(t[0])];
  const Point2& b = vertices[static_cast<size_t>(t[1])];
  const Point2& d = vertices[static_cast<size_t>(t[2])];
  return 0.5 * ((b.x - a.x) * (d.y - a.y) - (d.x - a.x) * (b.y - a.y));
}

double TriangleMesh2D::total_area() const {
  double s = 0.0;
  for (int c = 0; c < num_cells(); ++c) s += signed_cell_area(c);
  return s;
}

void TriangleMesh2D::rebuild_boundary() {
  // Count directed edges; an undirected edge seen once is a boundary edge.
  std::map<std::pair<int, int>, std::pair<int, int>> edge_use;  // (lo,hi) -> (count, cell)
  std::map<std::pair<int, int>, std::pair<int, int>> edge_dir;  // (lo,hi) -> directed (a,b)
  for (int c = 0; c < num_cells(); ++c) {
    const auto& t = cells[static_cast<size_t>(c)];
    for (int e = 0; e < 3; ++e) {
      int a = t[static_cast<size_t>(e)];
      int b = t[static_cast<size_t>((e + 1) % 3)];
      auto key = std::minmax(a, b);
      auto& use = edge_use[key];
      use.first += 1;
      use.second = c;
      edge_dir[key] = {a, b};
    }
  }
  boundary_edges.clear();
  std::set<int> bverts;
  for (const auto& [key, use] : edge_use) {
    if (use.first != 1) continue;
    const auto [a, b] = edge_dir[key];
    BoundaryEdge be;
    be.a = a;
    be.b = b;
    be.cell = use.second;
    const Point2& pa = vertices[static_cast<size_t>(a)];
    const Point2& pb = vertices[static_cast<size_t>(b)];
    double dx = pb.x - pa.x;
    double dy = pb.y - pa.y;
    be.length = std::hypot(dx, dy);
    if (be.length <= 0.0) throw MeshError("zero-length boundary edge");
    // cell is on the left of a->b, outward normal points right
    be.nx = dy / be.length;
    be.ny = -dx / be.length;
    boundary_edges.push_back(be);
    bverts.insert(a);
    bverts.insert(b);
  }
  boundary_vertex_ids.assign(bverts.begin(), bverts.end());
  boundary_index_.assign(vertices.size(), -1);
  for (int i = 0; i < num_boundary_vertices(); ++i)
    boundary_index_[static_cast<size_t>(boundary_vertex_ids[static_cast<size_t>(i)])] = i;
}

void TriangleMesh2D::validate() const {
  if (vertices.empty() || cells.empty()) throw MeshError("empty mesh");
  for (int c = 0; c < num_cells(); ++c) {
    for (int v : cells[static_cast<size_t>(c)])
      if (v < 0 || v >= num_vertices())
        throw MeshError("cell " + std::to_string(c) + " references invalid vertex");
    if (signed_cell_area(c) <= 0.0)
      throw MeshError("cell " + std::to_string(c) + " has non-positive area");
  }
  if (boundary_edges.empty()) throw MeshError("boundary structures not built");

  std::map<std::pair<int, int>, int> counts;
  for (int c = 0; c < num_cells(); ++c) {
    const auto& t = cells[static_cast<size_t>(c)];
    for (int e = 0; e < 3; ++e)
      counts[std::minmax(t[static_cast<size_t>(e)], t[static_cast<size_t>((e + 1) % 3)])]++;
  }
  std::map<int, int> degree;  // boundary vertex -> incident boundary edges
  for (const auto& be : boundary_edges) {
    auto it = counts.find(std::minmax(be.a, be.b));
    if (it == counts.end() || it->second != 1)
      throw MeshError("boundary edge not owned by exactly one cell");
    double n = std::hypot(be.nx, be.ny);
    if (std::abs(n - 1.0) > 1e-12) throw MeshError("boundary normal not unit length");
    // outwardness: normal must point away from the opposite vertex of the cell
    const auto& t = cells[static_cast<size_t>(be.cell)];
    int opp = -1;
    for (int v : t)
      if (v != be.a && v != be.b) opp = v;
    const Point2& pa = vertices[static_cast<size_t>(be.a)];
    const Point2& po = vertices[static_cast<size_t>(opp)];
    if ((po.x - pa.x) * be.nx + (po.y - pa.y) * be.ny >= 0.0)
      throw MeshError("boundary normal points inward");
    degree[be.a]++;
    degree[be.b]++;
  }
  for (const auto& [v, d] : degree)
    if (d != 2)
      throw MeshError("boundary vertex " + std::to_string(v) +
                      " has " + std::to_string(d) + " incident boundary edges");
  // closed loops: walk successors until every edge is visited
  std::map<int, std::vector<int>> adj;
  for (size_t e = 0; e < boundary_edges.size(); ++e) {
    adj[boundary_edges[e].a].push_back(static_cast<int>(e));
  }
  std::vector<bool> seen(boundary_edges.size(), false);
  size_t visited = 0;
  for (size_t e0 = 0; e0 < boundary_edges.size(); ++e0) {
    if (seen[e0]) continue;
    int start = boundary_edges[e0].a;
    int cur = start;
    int edge = static_cast<int>(e0);
    do {
      if (seen[static_cast<size_t>(edge)]) throw MeshError("boundary loop is not simple");
      seen[static_cast<size_t>(edge)] = true;
      ++visited;
      cur = boundary_edges[static_cast<size_t>(edge)].b;
      auto it = adj.find(cur);
      if (it == adj.end() || it->second.empty())
        throw MeshError("boundary edges do not form closed loops");
      edge = it->second.front();
    } while (cur != start);
  }
  if (visited != boundary_edges.size())
    throw MeshError("boundary edges do not cover the boundary");
  if (boundary_index_.size() != vertices.size())
    throw MeshError("boundary index map out of date");
}

TriangleMesh2D build_structured_mesh(int n, const Rect& domain) {
  if (n < 1) throw MeshError("build_structured_mesh: n must be >= 1");
  if (domain.width() <= 0.0 || domain.height() <= 0.0)
    throw MeshError("build_structured_mesh: degenerate rectangle");
  TriangleMesh2D mesh;
  const int nv = n + 1;
  mesh.vertices.resize(static_cast<size_t>(nv) * static_cast<size_t>(nv));
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nv; ++i)
      mesh.vertices[static_cast<size_t>(j * nv + i)] = {
          domain.x0 + domain.width() * i / n, domain.y0 + domain.height() * j / n};
  mesh.cells.reserve(static_cast<size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int v00 = j * nv + i;
      int v10 = v00 + 1;
      int v01 = v00 + nv;
      int v11 = v01 + 1;
      mesh.cells.push_back({v00, v10, v11});
      mesh.cells.push_back({v00, v11, v01});
    }
  }
  mesh.rebuild_boundary();
  mesh.validate();
  return mesh;
}

TriangleMesh2D make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> cells) {
  TriangleMesh2D mesh;
  mesh.vertices = std::move(vertices);
  mesh.cells = std::move(cells);
  mesh.rebuild_boundary();
  mesh.validate();
  return mesh;
}

}  // namespace damctl
