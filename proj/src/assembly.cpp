// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>

namespace damctl {

namespace {

struct CellGeom {
  double area;
  double gx[3];  // d phi_i / dx
  double gy[3];  // d phi_i / dy
};

CellGeom cell_geometry(const TriangleMesh2D& mesh, int c) {
  const auto& t = mesh.cells[static_cast<size_t>(c)];
  const Point2& p0 = mesh.vertices[static_cast<size_t>(t[0])];
  const Point2& p1 = mesh.vertices[static_cast<size_t>(t[1])];
  const Point2& p2 = mesh.vertices[static_cast<size_t>(t[2])];
  CellGeom g{};
  g.area = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
  if (!(g.area > 0.0))
    throw MeshError("degenerate cell " + std::to_string(c));
  const double inv = 1.0 / (2.0 * g.area);
  g.gx[0] = (p1.y - p2.y) * inv;
  g.gy[0] = (p2.x - p1.x) * inv;
  g.gx[1] = (p2.y - p0.y) * inv;
  g.gy[1] = (p0.x - p2.x) * inv;
  g.gx[2] = (p0.y - p1.y) * inv;
  g.gy[2] = (p1.x - p0.x) * inv;
  return g;
}

struct Voigt {
  double xx = 0.0, yy = 0.0, gamma = 0.0;  // engineering shear
};

Voigt basis_strain(const CellGeom& g, int i, int d) {
  if (d == 0) return {g.gx[i], 0.0, g.gy[i]};
  return {0.0, g.gy[i], g.gx[i]};
}

Voigt stress(const Voigt& e, const LameParams& lame) {
  const double tr = e.xx + e.yy;
  return {lame.lambda * tr + 2.0 * lame.mu * e.xx, lame.lambda * tr + 2.0 * lame.mu * e.yy,
          lame.mu * e.gamma};
}

double contract(const Voigt& s, const Voigt& e) {
  return s.xx * e.xx + s.yy * e.yy + s.gamma * e.gamma;
}

Voigt field_strain(const CellGeom& g, const std::array<int, 3>& t, const Vec& u) {
  Voigt e;
  for (int i = 0; i < 3; ++i) {
    const double ux = u[2 * t[static_cast<size_t>(i)]];
    const double uy = u[2 * t[static_cast<size_t>(i)] + 1];
    e.xx += ux * g.gx[i];
    e.yy += uy * g.gy[i];
    e.gamma += ux * g.gy[i] + uy * g.gx[i];
  }
  return e;
}

// exact \int_T phi_i phi_j phi_k = 2A a!b!c!/(a+b+c+2)!
double triple_product(double area, int i, int j, int k) {
  if (i == j && j == k) return area / 10.0;
  if (i == j || j == k || i == k) return area / 30.0;
  return area / 60.0;
}

int assembly_threads() {
  const char* env = std::getenv("DAMCTL_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  if (n < 1) return 1;
  return std::min<int>(n, static_cast<int>(std::thread::hardware_concurrency() > 0
                                               ? std::thread::hardware_concurrency()
                                               : 1));
}

// Runs the per-cell kernel over index-ordered chunks; chunk outputs are
// concatenated in chunk order so the triplet stream (and therefore the
// floating-point summation order) does not depend on thread timing.
std::vector<Triplet> assemble_triplets(
    const TriangleMesh2D& mesh,
    const std::function<void(int, std::vector<Triplet>&)>& kernel) {
  const int nc = mesh.num_cells();
  const int nthreads = std::min(assembly_threads(), std::max(1, nc));
  if (nthreads == 1) {
    std::vector<Triplet> out;
    for (int c = 0; c < nc; ++c) kernel(c, out);
    return out;
  }
  std::vector<std::vector<Triplet>> chunks(static_cast<size_t>(nthreads));
  std::vector<std::thread> workers;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int ti = 0; ti < nthreads; ++ti) {
    workers.emplace_back([&, ti] {
      const int lo = static_cast<int>(static_cast<long>(nc) * ti / nthreads);
      const int hi = static_cast<int>(static_cast<long>(nc) * (ti + 1) / nthreads);
      try {
        for (int c = lo; c < hi; ++c) kernel(c, chunks[static_cast<size_t>(ti)]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
  std::vector<Triplet> out;
  for (auto& ch : chunks) out.insert(out.end(), ch.begin(), ch.end());
  return out;
}

SpMat from_triplets(int rows, int cols, const std::vector<Triplet>& trips) {
  SpMat A(rows, cols);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

void check_scalar_size(const TriangleMesh2D& mesh, const Vec& v, const char* what) {
  if (v.size() != mesh.num_vertices())
    throw MeshError(std::string(what) + ": field length does not match vertex count");
}

void check_vector_size(const TriangleMesh2D& mesh, const Vec& v, const char* what) {
  if (v.size() != 2 * mesh.num_vertices())
    throw MeshError(std::string(what) + ": field length does not match 2 x vertex count");
}

}  // namespace

SpMat assemble_mass(const TriangleMesh2D& mesh) {
  auto trips = assemble_triplets(mesh, [&](int c, std::vector<Triplet>& out) {
    const auto g = cell_geometry(mesh, c);
    const auto& t = mesh.cells[static_cast<size_t>(c)];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        out.emplace_back(t[static_cast<size_t>(i)], t[static_cast<size_t>(j)],
                         g.area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0));
  });
  return from_triplets(mesh.num_vertices(), mesh.num_vertices(), trips);
}

Vec assemble_lumped_mass(const TriangleMesh2D& mesh) {
  Vec d = Vec::Zero(mesh.num_vertices());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto g = cell_geometry(mesh, c);
    for (int v : mesh.cells[static_cast<size_t>(c)]) d[v] += g.area / 3.0;
  }
  return d;
}

SpMat assemble_stiffness(const TriangleMesh2D& mesh) {
  auto trips = assemble_triplets(mesh, [&](int c, std::vector<Triplet>& out) {
    const auto g = cell_geometry(mesh, c);
    const auto& t = mesh.cells[static_cast<size_t>(c)];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        out.emplace_back(t[static_cast<size_t>(i)], t[static_cast<size_t>(j)],
                         g.area * (g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j]));
  });
  return from_triplets(mesh.num_vertices(), mesh.num_vertices(), trips);
}

SpMat assemble_vector_mass(const TriangleMesh2D& mesh) {
  auto trips = assemble_triplets(mesh, [&](int c, std::vector<Triplet>& out) {
    const auto g = cell_geometry(mesh, c);
    const auto& t = mesh.cells[static_cast<size_t>(c)];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double v = g.area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);
        for (int d = 0; d < 2; ++d)
          out.emplace_back(2 * t[static_cast<size_t>(i)] + d,
                           2 * t[static_cast<size_t>(j)] + d, v);
      }
  });
  return from_triplets(2 * mesh.num_vertices(), 2 * mesh.num_vertices(), trips);
}

SpMat assemble_weighted_mass(const TriangleMesh2D& mesh, const Vec& w) {
  check_scalar_size(mesh, w, "assemble_weighted_mass");
  auto trips = assemble_triplets(mesh, [&](int c, std::vector<Triplet>& out) {
    const auto g = cell_geometry(mesh, c);
    const auto& t = mesh.cells[static_cast<size_t>(c)];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k)
          v += w[t[static_cast<size_t>(k)]] * triple_product(g.area, i, j, k);
        out.emplace_back(t[static_cast<size_t>(i)], t[static_cast<size_t>(j)], v);
      }
  });
  return from_triplets(mesh.num_vertices(), mesh.num_vertices(), trips);
}

SpMat assemble_elasticity(const TriangleMesh2D& mesh, const Vec& coeff, const LameParams& lame) {
  check_scalar_size(mesh, coeff, "assemble_elasticity");
  for (Eigen::Index i = 0; i < coeff.size(); ++i)
    if (coeff[i] < 0.0)
      throw MeshError("assemble_elasticity: negative stiffness coefficient at vertex " +
                      std::to_string(i));
  return assemble_elasticity_signed(mesh, coeff, lame);
}

SpMat assemble_elasticity_signed(const TriangleMesh2D& mesh, const Vec& coeff,
                                 const LameParams& lame) {
  check_scalar_size(mesh, coeff, "assemble_elasticity");
  if (!(lame.mu > 0.0) || lame.lambda < 0.0)
    throw MeshError("assemble_elasticity: invalid Lame parameters");
  auto trips = assemble_triplets(mesh, [&](int c, std::vector<Triplet>& out) {
    const auto g = cell_geometry(mesh, c);
    const auto& t = mesh.cells[static_cast<size_t>(c)];
    const double cbar = (coeff[t[0]] + coeff[t[1]] + coeff[t[2]]) / 3.0;
    Voigt eps[3][2], sig[3][2];
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 2; ++d) {
        eps[i][d] = basis_strain(g, i, d);
        sig[i][d] = stress(eps[i][d], lame);
      }
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 2; ++d)
        for (int j = 0; j < 3; ++j)
          for (int e = 0; e < 2; ++e)
            out.emplace_back(2 * t[static_cast<size_t>(i)] + d,
                             2 * t[static_cast<size_t>(j)] + e,
                             g.area * cbar * contract(sig[j][e], eps[i][d]));
  });
  return from_triplets(2 * mesh.num_vertices(), 2 * mesh.num_vertices(), trips);
}

SpMat assemble_coupling(const TriangleMesh2D& mesh, const Vec& weight, const Vec& u,
                        const LameParams& lame) {
  check_scalar_size(mesh, weight, "assemble_coupling");
  check_vector_size(mesh, u, "assemble_coupling");
  auto trips = assemble_triplets(mesh, [&](int c, std::vector<Triplet>& out) {
    const auto g = cell_geometry(mesh, c);
    const auto& t = mesh.cells[static_cast<size_t>(c)];
    const Voigt su = stress(field_strain(g, t, u), lame);
    // row scale s_(i,d) = C eps(u) : eps(phi_(i,d)), column weights from the
    // exact P1 mass applied to the weight
    double wm[3];
    for (int j = 0; j < 3; ++j) {
      wm[j] = 0.0;
      for (int k = 0; k < 3; ++k)
        wm[j] += weight[t[static_cast<size_t>(k)]] * g.area * (j == k ? 1.0 / 6.0 : 1.0 / 12.0);
    }
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 2; ++d) {
        const double s = contract(su, basis_strain(g, i, d));
        for (int j = 0; j < 3; ++j)
          out.emplace_back(2 * t[static_cast<size_t>(i)] + d, t[static_cast<size_t>(j)],
                           s * wm[j]);
      }
  });
  return from_triplets(2 * mesh.num_vertices(), mesh.num_vertices(), trips);
}

Vec assemble_coupling_load(const TriangleMesh2D& mesh, const Vec& weight, const Vec& u,
                           const LameParams& lame) {
  check_scalar_size(mesh, weight, "assemble_coupling_load");
  check_vector_size(mesh, u, "assemble_coupling_load");
  Vec load = Vec::Zero(mesh.num_vertices());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto g = cell_geometry(mesh, c);
    const auto& t = mesh.cells[static_cast<size_t>(c)];
    const Voigt eu = field_strain(g, t, u);
    const double energy = contract(stress(eu, lame), eu);
    for (int j = 0; j < 3; ++j) {
      double wm = 0.0;
      for (int k = 0; k < 3; ++k)
        wm += weight[t[static_cast<size_t>(k)]] * g.area * (j == k ? 1.0 / 6.0 : 1.0 / 12.0);
      load[t[static_cast<size_t>(j)]] += energy * wm;
    }
  }
  return load;
}

SpMat assemble_strain_energy_mass(const TriangleMesh2D& mesh, const Vec& weight, const Vec& u,
                                  const LameParams& lame) {
  check_scalar_size(mesh, weight, "assemble_strain_energy_mass");
  check_vector_size(mesh, u, "assemble_strain_energy_mass");
  auto trips = assemble_triplets(mesh, [&](int c, std::vector<Triplet>& out) {
    const auto g = cell_geometry(mesh, c);
    const auto& t = mesh.cells[static_cast<size_t>(c)];
    const Voigt eu = field_strain(g, t, u);
    const double energy = contract(stress(eu, lame), eu);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k)
          v += weight[t[static_cast<size_t>(k)]] * triple_product(g.area, i, j, k);
        out.emplace_back(t[static_cast<size_t>(i)], t[static_cast<size_t>(j)], energy * v);
      }
  });
  return from_triplets(mesh.num_vertices(), mesh.num_vertices(), trips);
}

Vec boundary_arc_weights(const TriangleMesh2D& mesh) {
  Vec w = Vec::Zero(mesh.num_boundary_vertices());
  for (const auto& be : mesh.boundary_edges) {
    w[mesh.boundary_index(be.a)] += 0.5 * be.length;
    w[mesh.boundary_index(be.b)] += 0.5 * be.length;
  }
  return w;
}

SpMat assemble_boundary_mass(const TriangleMesh2D& mesh) {
  std::vector<Triplet> trips;
  for (const auto& be : mesh.boundary_edges) {
    const int ia = mesh.boundary_index(be.a);
    const int ib = mesh.boundary_index(be.b);
    trips.emplace_back(ia, ia, be.length / 3.0);
    trips.emplace_back(ib, ib, be.length / 3.0);
    trips.emplace_back(ia, ib, be.length / 6.0);
    trips.emplace_back(ib, ia, be.length / 6.0);
  }
  return from_triplets(mesh.num_boundary_vertices(), mesh.num_boundary_vertices(), trips);
}

Vec assemble_boundary_load(const TriangleMesh2D& mesh, const Vec& g_boundary) {
  if (g_boundary.size() != 2 * mesh.num_boundary_vertices())
    throw MeshError("assemble_boundary_load: field length does not match boundary");
  Vec load = Vec::Zero(2 * mesh.num_vertices());
  for (const auto& be : mesh.boundary_edges) {
    const int ia = mesh.boundary_index(be.a);
    const int ib = mesh.boundary_index(be.b);
    for (int d = 0; d < 2; ++d) {
      load[2 * be.a + d] += be.length * (g_boundary[2 * ia + d] / 3.0 + g_boundary[2 * ib + d] / 6.0);
      load[2 * be.b + d] += be.length * (g_boundary[2 * ia + d] / 6.0 + g_boundary[2 * ib + d] / 3.0);
    }
  }
  return load;
}

Vec assemble_boundary_load_full(const TriangleMesh2D& mesh, const Vec& g_full) {
  check_vector_size(mesh, g_full, "assemble_boundary_load_full");
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (mesh.boundary_index(v) < 0 && (g_full[2 * v] != 0.0 || g_full[2 * v + 1] != 0.0))
      throw MeshError("assemble_boundary_load_full: traction on non-boundary vertex " +
                      std::to_string(v));
  return assemble_boundary_load(mesh, restrict_to_boundary(mesh, g_full));
}

Vec assemble_boundary_edge_load(const TriangleMesh2D& mesh, int edge_index, double gx,
                                double gy) {
  if (edge_index < 0 || edge_index >= static_cast<int>(mesh.boundary_edges.size()))
    throw MeshError("assemble_boundary_edge_load: invalid edge index");
  const auto& be = mesh.boundary_edges[static_cast<size_t>(edge_index)];
  Vec load = Vec::Zero(2 * mesh.num_vertices());
  // \int_e g . phi with constant g: each endpoint receives |e|/2 g
  load[2 * be.a] = 0.5 * be.length * gx;
  load[2 * be.a + 1] = 0.5 * be.length * gy;
  load[2 * be.b] = 0.5 * be.length * gx;
  load[2 * be.b + 1] = 0.5 * be.length * gy;
  return load;
}

Vec restrict_to_boundary(const TriangleMesh2D& mesh, const Vec& full) {
  check_vector_size(mesh, full, "restrict_to_boundary");
  Vec out(2 * mesh.num_boundary_vertices());
  for (int i = 0; i < mesh.num_boundary_vertices(); ++i) {
    const int v = mesh.boundary_vertex_ids[static_cast<size_t>(i)];
    out[2 * i] = full[2 * v];
    out[2 * i + 1] = full[2 * v + 1];
  }
  return out;
}

Vec extend_from_boundary(const TriangleMesh2D& mesh, const Vec& boundary) {
  if (boundary.size() != 2 * mesh.num_boundary_vertices())
    throw MeshError("extend_from_boundary: field length does not match boundary");
  Vec out = Vec::Zero(2 * mesh.num_vertices());
  for (int i = 0; i < mesh.num_boundary_vertices(); ++i) {
    const int v = mesh.boundary_vertex_ids[static_cast<size_t>(i)];
    out[2 * v] = boundary[2 * i];
    out[2 * v + 1] = boundary[2 * i + 1];
  }
  return out;
}

Vec component(const Vec& interleaved, int d) {
  Vec out(interleaved.size() / 2);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = interleaved[2 * i + d];
  return out;
}

}  // namespace damctl
