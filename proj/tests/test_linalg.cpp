// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "damctl/assembly.hpp"
#include "damctl/geometry.hpp"
#include "damctl/linalg.hpp"
#include "support/dense_lu.hpp"

using namespace damctl;

namespace {

SpMat random_spd(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Mat B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = unit(rng);
  Mat A = B.transpose() * B + static_cast<double>(n) * Mat::Identity(n, n);
  return A.sparseView();
}

}  // namespace

TEST_CASE("mass system reproduces a constant") {
  const TriangleMesh2D mesh = build_structured_mesh(4, {});
  const SpMat M = assemble_mass(mesh);
  const Vec c = Vec::Constant(mesh.num_vertices(), 2.5);
  const Vec x = solve_spd(M, M * c);
  CHECK((x - c).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("zero right-hand side returns exact zero") {
  const TriangleMesh2D mesh = build_structured_mesh(3, {});
  const SpMat M = assemble_mass(mesh);
  const Vec x = solve_spd(M, Vec::Zero(mesh.num_vertices()));
  CHECK(x.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("random SPD solve matches the dense factorization oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const SpMat A = random_spd(10, rng);
    Vec b(10);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) b[i] = unit(rng);
    const Vec x = solve_spd(A, b, {1e-12, 0});
    const Vec x_ref = testing::dense_lu_solve(Mat(A), b);
    CHECK((x - x_ref).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("non-convergence carries the final residual") {
  std::mt19937_64 rng(3);
  const SpMat A = random_spd(40, rng);
  Vec b = Vec::Ones(40);
  try {
    (void)solve_spd(A, b, {1e-14, 1});
    FAIL("expected SolveError");
  } catch (const SolveError& err) {
    CHECK(err.residual > 0.0);
    CHECK(std::string(err.what()).find("solve_spd") != std::string::npos);
  }
}

TEST_CASE("minres handles symmetric indefinite systems") {
  std::mt19937_64 rng(11);
  const SpMat P = random_spd(12, rng);
  Mat A = Mat(P);
  A.block(0, 0, 6, 6) *= -1.0;    // make it indefinite
  A = 0.5 * (A + A.transpose());  // keep it symmetric
  const SpMat As = A.sparseView();
  Vec b(12);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 12; ++i) b[i] = unit(rng);
  REQUIRE(is_symmetric(As));
  const Vec x = solve_symmetric(As, b, {1e-11, 0});
  CHECK((Mat(As) * x - b).norm() <= 1e-10 * b.norm());
}

TEST_CASE("bicgstab handles mildly nonsymmetric systems") {
  std::mt19937_64 rng(13);
  Mat A = Mat(random_spd(12, rng));
  A(2, 7) += 0.25;  // break symmetry
  const SpMat As = A.sparseView();
  CHECK_FALSE(is_symmetric(As));
  Vec b = Vec::LinSpaced(12, -1.0, 1.0);
  const Vec x = solve_general(As, b, {1e-12, 0});
  const Vec x_ref = testing::dense_lu_solve(A, b);
  CHECK((x - x_ref).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("symmetry detector") {
  const TriangleMesh2D mesh = build_structured_mesh(3, {});
  CHECK(is_symmetric(assemble_mass(mesh)));
  CHECK(is_symmetric(assemble_stiffness(mesh)));
}
