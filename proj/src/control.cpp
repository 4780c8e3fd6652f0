// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/control.hpp"

#include <cmath>

namespace damctl {

Control Control::zero(const TriangleMesh2D& mesh, int num_steps) {
  Control c;
  const int nb = mesh.num_boundary_vertices();
  c.values.assign(static_cast<size_t>(num_steps + 1), Vec::Zero(2 * nb));
  c.b_min = Vec::Constant(2 * nb, -std::numeric_limits<double>::infinity());
  c.b_max = Vec::Constant(2 * nb, std::numeric_limits<double>::infinity());
  return c;
}

void Control::project() {
  for (auto& v : values) v = v.cwiseMax(b_min).cwiseMin(b_max);
}

Control Control::projected() const {
  Control out = *this;
  out.project();
  return out;
}

bool Control::feasible(double tol) const {
  for (const auto& v : values)
    if (((v - b_max).array() > tol).any() || ((b_min - v).array() > tol).any()) return false;
  return true;
}

Control& Control::operator+=(const Control& other) {
  for (size_t k = 0; k < values.size(); ++k) values[k] += other.values[k];
  return *this;
}
Control& Control::operator-=(const Control& other) {
  for (size_t k = 0; k < values.size(); ++k) values[k] -= other.values[k];
  return *this;
}
Control& Control::operator*=(double s) {
  for (auto& v : values) v *= s;
  return *this;
}
Control operator+(Control a, const Control& b) { return a += b; }
Control operator-(Control a, const Control& b) { return a -= b; }
Control operator*(double s, Control a) { return a *= s; }

namespace {

std::vector<double> time_weights(int nodes, double T) {
  const int M = nodes - 1;
  const double tau = T / M;
  std::vector<double> w(static_cast<size_t>(nodes), tau);
  w.front() = 0.5 * tau;
  w.back() = 0.5 * tau;
  return w;
}

double slice_inner(const Vec& arc, const Vec& a, const Vec& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < arc.size(); ++i)
    s += arc[i] * (a[2 * i] * b[2 * i] + a[2 * i + 1] * b[2 * i + 1]);
  return s;
}

}  // namespace

double inner_sigma(const TriangleMesh2D& mesh, double T, const Control& a, const Control& b) {
  if (a.num_time_nodes() != b.num_time_nodes() || a.num_time_nodes() < 2)
    throw MeshError("inner_sigma: mismatched or too-short time grids");
  const Vec arc = boundary_arc_weights(mesh);
  const auto w = time_weights(a.num_time_nodes(), T);
  double s = 0.0;
  for (int k = 0; k < a.num_time_nodes(); ++k)
    s += w[static_cast<size_t>(k)] * slice_inner(arc, a.values[static_cast<size_t>(k)],
                                                 b.values[static_cast<size_t>(k)]);
  return s;
}

double norm_sigma(const TriangleMesh2D& mesh, double T, const Control& a) {
  return std::sqrt(std::max(0.0, inner_sigma(mesh, T, a, a)));
}

BNormParts norm_B(const Control& b, const TriangleMesh2D& mesh, double T) {
  if (b.num_time_nodes() < 2) throw MeshError("norm_B: needs at least two time nodes");
  const int nb = mesh.num_boundary_vertices();
  const int nodes = b.num_time_nodes();
  const double tau = T / (nodes - 1);
  const Vec arc = boundary_arc_weights(mesh);
  const auto w = time_weights(nodes, T);

  BNormParts parts;
  double hhalf_sq = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const Vec& g = b.values[static_cast<size_t>(k)];
    const double l2 = slice_inner(arc, g, g);
    parts.l2_sigma_sq += w[static_cast<size_t>(k)] * l2;
    // Slobodeckij double sum over distinct boundary vertex pairs
    double semi = 0.0;
    for (int i = 0; i < nb; ++i) {
      const Point2& pi = mesh.vertices[static_cast<size_t>(mesh.boundary_vertex_ids[static_cast<size_t>(i)])];
      for (int j = 0; j < nb; ++j) {
        if (i == j) continue;
        const Point2& pj =
            mesh.vertices[static_cast<size_t>(mesh.boundary_vertex_ids[static_cast<size_t>(j)])];
        const double dx = g[2 * i] - g[2 * j];
        const double dy = g[2 * i + 1] - g[2 * j + 1];
        const double dist2 = (pi.x - pj.x) * (pi.x - pj.x) + (pi.y - pj.y) * (pi.y - pj.y);
        semi += arc[i] * arc[j] * (dx * dx + dy * dy) / dist2;
      }
    }
    hhalf_sq += w[static_cast<size_t>(k)] * (l2 + semi);
  }
  double h1_sq = parts.l2_sigma_sq;
  for (int k = 1; k < nodes; ++k) {
    const Vec rate = (b.values[static_cast<size_t>(k)] - b.values[static_cast<size_t>(k - 1)]) / tau;
    h1_sq += tau * slice_inner(arc, rate, rate);
  }
  parts.h_half = std::sqrt(hhalf_sq);
  parts.h1_time = std::sqrt(h1_sq);
  parts.total = parts.h_half + parts.h1_time;
  return parts;
}

}  // namespace damctl
