// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/vtk_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace damctl {

namespace {

class IoFailure : public MeshError {
public:
  using MeshError::MeshError;
};

void print_double(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

void write_point_data(std::ostream& out, const std::vector<VtkPointData>& data, size_t npoints) {
  if (data.empty()) return;
  out << "POINT_DATA " << npoints << "\n";
  for (const auto& field : data) {
    if (field.components == 1) {
      out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
      for (Eigen::Index i = 0; i < field.values.size(); ++i) {
        print_double(out, field.values[i]);
        out << "\n";
      }
    } else {
      out << "VECTORS " << field.name << " double\n";
      for (Eigen::Index i = 0; i < field.values.size() / 2; ++i) {
        print_double(out, field.values[2 * i]);
        out << " ";
        print_double(out, field.values[2 * i + 1]);
        out << " 0\n";
      }
    }
  }
}

}  // namespace

void write_vtk_mesh(const std::string& path, const TriangleMesh2D& mesh,
                    const std::vector<VtkPointData>& data) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoFailure("cannot open '" + tmp + "'");
    out << "# vtk DataFile Version 3.0\ndamctl mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& p : mesh.vertices) {
      print_double(out, p.x);
      out << " ";
      print_double(out, p.y);
      out << " 0\n";
    }
    out << "CELLS " << mesh.num_cells() << " " << 4 * mesh.num_cells() << "\n";
    for (const auto& c : mesh.cells) out << "3 " << c[0] << " " << c[1] << " " << c[2] << "\n";
    out << "CELL_TYPES " << mesh.num_cells() << "\n";
    for (int c = 0; c < mesh.num_cells(); ++c) out << "5\n";
    write_point_data(out, data, mesh.vertices.size());
    if (!out) throw IoFailure("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

TriangleMesh2D read_vtk_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open '" + path + "'");
  std::string token;
  std::vector<Point2> points;
  std::vector<std::array<int, 3>> cells;
  std::vector<int> raw_cells;
  while (in >> token) {
    if (token == "POINTS") {
      size_t n = 0;
      std::string type;
      in >> n >> type;
      points.resize(n);
      for (size_t i = 0; i < n; ++i) {
        double z;
        in >> points[i].x >> points[i].y >> z;
      }
    } else if (token == "CELLS") {
      size_t n = 0, total = 0;
      in >> n >> total;
      raw_cells.resize(total);
      for (size_t i = 0; i < total; ++i) in >> raw_cells[i];
    } else if (token == "CELL_TYPES") {
      size_t n = 0;
      in >> n;
      std::vector<int> types(n);
      for (auto& t : types) in >> t;
      size_t offset = 0;
      for (size_t i = 0; i < n; ++i) {
        const int count = raw_cells.at(offset);
        if (types[i] == 5) {
          if (count != 3) throw IoFailure("triangle cell with wrong vertex count");
          cells.push_back({raw_cells[offset + 1], raw_cells[offset + 2], raw_cells[offset + 3]});
        }
        offset += static_cast<size_t>(count) + 1;
      }
      break;
    }
  }
  if (points.empty() || cells.empty()) throw IoFailure("'" + path + "' holds no triangle grid");
  return make_mesh(std::move(points), std::move(cells));
}

void write_vtk_boundary(const std::string& path, const TriangleMesh2D& mesh,
                        const std::vector<VtkPointData>& boundary_data) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoFailure("cannot open '" + tmp + "'");
    const int nb = mesh.num_boundary_vertices();
    out << "# vtk DataFile Version 3.0\ndamctl boundary\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nb << " double\n";
    for (int i = 0; i < nb; ++i) {
      const Point2& p = mesh.vertices[static_cast<size_t>(mesh.boundary_vertex_ids[static_cast<size_t>(i)])];
      print_double(out, p.x);
      out << " ";
      print_double(out, p.y);
      out << " 0\n";
    }
    const auto& edges = mesh.boundary_edges;
    out << "CELLS " << edges.size() << " " << 3 * edges.size() << "\n";
    for (const auto& be : edges)
      out << "2 " << mesh.boundary_index(be.a) << " " << mesh.boundary_index(be.b) << "\n";
    out << "CELL_TYPES " << edges.size() << "\n";
    for (size_t e = 0; e < edges.size(); ++e) out << "3\n";
    write_point_data(out, boundary_data, static_cast<size_t>(nb));
    if (!out) throw IoFailure("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace damctl
