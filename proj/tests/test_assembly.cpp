// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "damctl/assembly.hpp"
#include "support/oracles.hpp"

using namespace damctl;

namespace {

Vec random_vec(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = unit(rng);
  return v;
}

Vec interpolate_vector(const TriangleMesh2D& mesh, double (*fx)(double, double),
                       double (*fy)(double, double)) {
  Vec u(2 * mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Point2& p = mesh.vertices[static_cast<size_t>(v)];
    u[2 * v] = fx(p.x, p.y);
    u[2 * v + 1] = fy(p.x, p.y);
  }
  return u;
}

}  // namespace

TEST_CASE("mass matrix of the reference triangle") {
  const TriangleMesh2D mesh = testing::reference_triangle_mesh();
  const Mat M = Mat(assemble_mass(mesh));
  Mat expect(3, 3);
  expect << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  expect /= 24.0;
  CHECK((M - expect).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("mass matrix totals the domain area and pairs constants") {
  const TriangleMesh2D mesh = build_structured_mesh(5, {0.0, 0.0, 2.0, 3.0});
  const SpMat M = assemble_mass(mesh);
  CHECK(Mat(M).sum() == doctest::Approx(6.0).epsilon(1e-12));
  const Vec c = Vec::Constant(mesh.num_vertices(), 4.0);
  CHECK(Vec::Ones(mesh.num_vertices()).dot(M * c) == doctest::Approx(4.0 * 6.0).epsilon(1e-12));
  // lumped row sums = vertex patch areas / 3
  const Vec lumped = assemble_lumped_mass(mesh);
  CHECK((Vec(Mat(M).rowwise().sum()) - lumped).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("stiffness matrix of the reference triangle") {
  const TriangleMesh2D mesh = testing::reference_triangle_mesh();
  const Mat K = Mat(assemble_stiffness(mesh));
  Mat expect(3, 3);
  expect << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  expect *= 0.5;
  CHECK((K - expect).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("degenerate cells are rejected by name") {
  TriangleMesh2D mesh = build_structured_mesh(2, {});
  std::swap(mesh.cells[3][0], mesh.cells[3][1]);  // flip orientation
  CHECK_THROWS_WITH_AS(assemble_stiffness(mesh), doctest::Contains("cell 3"), MeshError);
}

TEST_CASE("stiffness kernel is the constants") {
  const TriangleMesh2D mesh = build_structured_mesh(6, {});
  const SpMat K = assemble_stiffness(mesh);
  const Vec c = Vec::Constant(mesh.num_vertices(), 3.7);
  CHECK((K * c).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("stiffness quadratic form of x1 on the unit square") {
  const TriangleMesh2D mesh = build_structured_mesh(8, {});
  const SpMat K = assemble_stiffness(mesh);
  Vec f(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) f[v] = mesh.vertices[static_cast<size_t>(v)].x;
  CHECK(f.dot(K * f) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("elasticity annihilates rigid modes") {
  const TriangleMesh2D mesh = build_structured_mesh(5, {});
  const int m = mesh.num_vertices();
  const SpMat E = assemble_elasticity(mesh, Vec::Ones(m), {1.0, 1.0});
  const Vec tx = interpolate_vector(mesh, [](double, double) { return 1.0; },
                                    [](double, double) { return 0.0; });
  const Vec ty = interpolate_vector(mesh, [](double, double) { return 0.0; },
                                    [](double, double) { return 1.0; });
  const Vec rot = interpolate_vector(mesh, [](double, double y) { return -y; },
                                     [](double x, double) { return x; });
  CHECK(std::abs(tx.dot(E * tx)) <= 1e-12);
  CHECK(std::abs(ty.dot(E * ty)) <= 1e-12);
  CHECK(std::abs(rot.dot(E * rot)) <= 1e-10);
}

TEST_CASE("elasticity energy of uniform strain") {
  const TriangleMesh2D mesh = build_structured_mesh(4, {});
  const SpMat E = assemble_elasticity(mesh, Vec::Ones(mesh.num_vertices()), {1.0, 1.0});
  const Vec u = interpolate_vector(mesh, [](double x, double) { return x; },
                                   [](double, double) { return 0.0; });
  // (lambda + 2 mu) * |Omega| = 3
  CHECK(u.dot(E * u) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("elasticity is linear in its coefficient") {
  const TriangleMesh2D mesh = build_structured_mesh(3, {});
  const int m = mesh.num_vertices();
  const Mat E1 = Mat(assemble_elasticity(mesh, Vec::Ones(m), {1.3, 0.7}));
  const Mat E2 = Mat(assemble_elasticity(mesh, Vec::Constant(m, 2.0), {1.3, 0.7}));
  CHECK((E2 - 2.0 * E1).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK_THROWS_AS(assemble_elasticity(mesh, Vec::Constant(m, -0.1), {1.0, 1.0}), MeshError);
}

TEST_CASE("elasticity positive on fields orthogonal to the rigid modes") {
  const TriangleMesh2D mesh = build_structured_mesh(4, {});
  const int m = mesh.num_vertices();
  const SpMat E = assemble_elasticity(mesh, Vec::Ones(m), {1.0, 1.0});
  const SpMat Mv = assemble_vector_mass(mesh);
  std::vector<Vec> rigid = {
      interpolate_vector(mesh, [](double, double) { return 1.0; },
                         [](double, double) { return 0.0; }),
      interpolate_vector(mesh, [](double, double) { return 0.0; },
                         [](double, double) { return 1.0; }),
      interpolate_vector(mesh, [](double, double y) { return -y; },
                         [](double x, double) { return x; })};
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Vec v = random_vec(2 * m, rng);
    for (const Vec& r : rigid) v -= (v.dot(Mv * r) / r.dot(Mv * r)) * r;
    CHECK(v.dot(E * v) > 1e-10);
  }
}

TEST_CASE("coupling vanishes for zero factors") {
  const TriangleMesh2D mesh = build_structured_mesh(3, {});
  const int m = mesh.num_vertices();
  std::mt19937_64 rng(17);
  const Vec w = random_vec(m, rng);
  const Vec u = random_vec(2 * m, rng);
  CHECK(Mat(assemble_coupling(mesh, w, Vec::Zero(2 * m), {1.0, 1.0})).lpNorm<Eigen::Infinity>() ==
        0.0);
  CHECK(Mat(assemble_coupling(mesh, Vec::Zero(m), u, {1.0, 1.0})).lpNorm<Eigen::Infinity>() ==
        0.0);
}

TEST_CASE("coupling pairs back to the elasticity energy") {
  // with q = 1 and phi = u the pairing is \int w C eps(u):eps(u)
  const TriangleMesh2D mesh = build_structured_mesh(4, {});
  const int m = mesh.num_vertices();
  std::mt19937_64 rng(23);
  const Vec u = random_vec(2 * m, rng);
  const Vec w = Vec::Constant(m, 0.8);
  const LameParams lame{1.1, 0.6};
  const SpMat B = assemble_coupling(mesh, w, u, lame);
  const SpMat E = assemble_elasticity(mesh, w, lame);
  CHECK(u.dot(B * Vec::Ones(m)) == doctest::Approx(u.dot(E * u)).epsilon(1e-12));
  // the load form matches as well
  const Vec load = assemble_coupling_load(mesh, w, u, lame);
  CHECK(load.sum() == doctest::Approx(u.dot(E * u)).epsilon(1e-12));
}

TEST_CASE("coupling transpose identity") {
  const TriangleMesh2D mesh = build_structured_mesh(3, {});
  const int m = mesh.num_vertices();
  std::mt19937_64 rng(29);
  const Vec w = random_vec(m, rng);
  const Vec u = random_vec(2 * m, rng);
  const SpMat B = assemble_coupling(mesh, w, u, {1.0, 1.0});
  const Vec q = random_vec(m, rng);
  const Vec p = random_vec(2 * m, rng);
  CHECK(p.dot(B * q) == doctest::Approx(q.dot(B.transpose() * p)).epsilon(1e-14));
}

TEST_CASE("boundary load of a constant traction sums to the perimeter") {
  const TriangleMesh2D mesh = build_structured_mesh(4, {});
  Vec g(2 * mesh.num_boundary_vertices());
  for (int i = 0; i < mesh.num_boundary_vertices(); ++i) {
    g[2 * i] = 1.0;
    g[2 * i + 1] = 0.0;
  }
  const Vec load = assemble_boundary_load(mesh, g);
  double sx = 0.0, sy = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    sx += load[2 * v];
    sy += load[2 * v + 1];
  }
  CHECK(sx == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(sy) <= 1e-14);
  // interior vertices receive nothing
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (mesh.boundary_index(v) < 0) CHECK(load[2 * v] == 0.0);
}

TEST_CASE("boundary load of zero traction") {
  const TriangleMesh2D mesh = build_structured_mesh(3, {});
  const Vec load =
      assemble_boundary_load(mesh, Vec::Zero(2 * mesh.num_boundary_vertices()));
  CHECK(load.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("single edge with unit traction gives h/2 per endpoint") {
  const TriangleMesh2D mesh = build_structured_mesh(4, {});
  const auto& be = mesh.boundary_edges.front();
  const Vec load = assemble_boundary_edge_load(mesh, 0, 1.0, 0.0);
  CHECK(load[2 * be.a] == doctest::Approx(0.5 * be.length).epsilon(1e-14));
  CHECK(load[2 * be.b] == doctest::Approx(0.5 * be.length).epsilon(1e-14));
  CHECK(load.sum() == doctest::Approx(be.length).epsilon(1e-14));
}

TEST_CASE("full-field boundary load rejects interior support") {
  const TriangleMesh2D mesh = build_structured_mesh(3, {});
  Vec g = Vec::Zero(2 * mesh.num_vertices());
  int interior = -1;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (mesh.boundary_index(v) < 0) interior = v;
  REQUIRE(interior >= 0);
  g[2 * interior] = 1.0;
  CHECK_THROWS_AS(assemble_boundary_load_full(mesh, g), MeshError);
  g[2 * interior] = 0.0;
  CHECK_NOTHROW(assemble_boundary_load_full(mesh, g));
}

TEST_CASE("assemblies are linear in their coefficients") {
  const TriangleMesh2D mesh = build_structured_mesh(3, {});
  const int m = mesh.num_vertices();
  std::mt19937_64 rng(31);
  const Vec w1 = random_vec(m, rng);
  const Vec w2 = random_vec(m, rng);
  const Vec u = random_vec(2 * m, rng);
  const LameParams lame{0.9, 1.2};
  const Mat A12 = Mat(assemble_weighted_mass(mesh, w1 + w2));
  const Mat A1 = Mat(assemble_weighted_mass(mesh, w1));
  const Mat A2 = Mat(assemble_weighted_mass(mesh, w2));
  CHECK((A12 - A1 - A2).lpNorm<Eigen::Infinity>() <= 1e-12);
  const Mat B12 = Mat(assemble_coupling(mesh, w1 + w2, u, lame));
  const Mat B1 = Mat(assemble_coupling(mesh, w1, u, lame));
  const Mat B2 = Mat(assemble_coupling(mesh, w2, u, lame));
  CHECK((B12 - B1 - B2).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("weighted mass reduces to the plain mass for unit weight") {
  const TriangleMesh2D mesh = build_structured_mesh(4, {});
  const Mat W = Mat(assemble_weighted_mass(mesh, Vec::Ones(mesh.num_vertices())));
  const Mat M = Mat(assemble_mass(mesh));
  CHECK((W - M).lpNorm<Eigen::Infinity>() <= 1e-13);
}

TEST_CASE("strain energy mass matches the coupling load against constants") {
  const TriangleMesh2D mesh = build_structured_mesh(3, {});
  const int m = mesh.num_vertices();
  std::mt19937_64 rng(37);
  const Vec w = random_vec(m, rng);
  const Vec u = random_vec(2 * m, rng);
  const LameParams lame{1.0, 1.0};
  const SpMat G = assemble_strain_energy_mass(mesh, w, u, lame);
  const Vec load = assemble_coupling_load(mesh, w, u, lame);
  // G applied to the constant 1 integrates the same density
  CHECK((G * Vec::Ones(m) - load).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(is_symmetric(G));
}

TEST_CASE("mass stays positive definite under refinement") {
  for (int n : {4, 16}) {
    const TriangleMesh2D mesh = build_structured_mesh(n, {});
    const double lambda_min = testing::smallest_eigenvalue(assemble_mass(mesh), 60);
    CHECK(lambda_min > 0.0);
  }
}

TEST_CASE("threaded assembly is bit-identical to serial") {
  const TriangleMesh2D mesh = build_structured_mesh(9, {});
  const int m = mesh.num_vertices();
  std::mt19937_64 rng(47);
  const Vec coeff = random_vec(m, rng).array() + 2.0;
  const Mat serial_K = Mat(assemble_stiffness(mesh));
  const Mat serial_E = Mat(assemble_elasticity(mesh, coeff, {1.0, 1.0}));
  setenv("DAMCTL_THREADS", "3", 1);
  const Mat threaded_K = Mat(assemble_stiffness(mesh));
  const Mat threaded_E = Mat(assemble_elasticity(mesh, coeff, {1.0, 1.0}));
  unsetenv("DAMCTL_THREADS");
  CHECK(serial_K == threaded_K);
  CHECK(serial_E == threaded_E);
}

TEST_CASE("stiffness energy converges at second order") {
  // Dirichlet energy of sin(pi x) sin(pi y) is pi^2 / 2
  const double exact = M_PI * M_PI / 2.0;
  std::vector<double> errors;
  for (int n : {8, 16, 32}) {
    const TriangleMesh2D mesh = build_structured_mesh(n, {});
    const SpMat K = assemble_stiffness(mesh);
    Vec f(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const Point2& p = mesh.vertices[static_cast<size_t>(v)];
      f[v] = std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
    }
    errors.push_back(std::abs(f.dot(K * f) - exact));
  }
  CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.25));
  CHECK(errors[1] / errors[2] == doctest::Approx(4.0).epsilon(0.25));
}
