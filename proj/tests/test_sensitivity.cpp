// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "damctl/assembly.hpp"
#include "damctl/sensitivity.hpp"
#include "support/scenarios.hpp"

using namespace damctl;

namespace {

StateProblem small_reference() {
  auto mesh = std::make_shared<TriangleMesh2D>(testing::reference_triangle_mesh());
  StateProblem p = testing::blank_problem(mesh, 0.2, 4);
  p.law.delta = 0.05;
  p.law.gamma_xi = 10.0;
  p.law.eps_xi = 0.1;
  p.law.mu_visc = 0.2;
  p.law.f_coeffs = {0.1, -0.1, 0.0, 0.0, 0.0};
  p.chi0.setConstant(0.55);
  for (int k = 0; k <= p.M; ++k)
    for (int i = 0; i < mesh->num_boundary_vertices(); ++i) {
      p.control.values[static_cast<size_t>(k)][2 * i] = 0.3 * std::sin(1.0 + k + i);
      p.control.values[static_cast<size_t>(k)][2 * i + 1] = 0.2 * std::cos(2.0 + k - i);
    }
  return p;
}

}  // namespace

TEST_CASE("zero direction gives the zero tangent") {
  const StateProblem p = testing::reference_problem(3, 0.3, 6);
  const StateTrajectory traj = solve_state(p);
  const Control h = Control::zero(*p.mesh, p.M);
  const LinearizedTrajectory lin = solve_linearized(p, traj, h);
  for (int k = 0; k <= p.M; ++k) {
    CHECK(lin.udot[static_cast<size_t>(k)].lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(lin.chidot[static_cast<size_t>(k)].lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("tangent is homogeneous in the direction") {
  StateProblem p = testing::reference_problem(3, 0.3, 6);
  p.stepper.linear_rtol = 1e-14;
  const StateTrajectory traj = solve_state(p);
  std::mt19937_64 rng(67);
  const Control h = testing::random_control(*p.mesh, p.M, 0.5, rng);
  const LinearizedTrajectory lin1 = solve_linearized(p, traj, h);
  const LinearizedTrajectory lin2 = solve_linearized(p, traj, 2.0 * h);
  for (int k = 0; k <= p.M; ++k) {
    const double scale = std::max(1.0, lin1.udot[static_cast<size_t>(k)].lpNorm<Eigen::Infinity>());
    CHECK((lin2.udot[static_cast<size_t>(k)] - 2.0 * lin1.udot[static_cast<size_t>(k)])
              .lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
    CHECK((lin2.chidot[static_cast<size_t>(k)] - 2.0 * lin1.chidot[static_cast<size_t>(k)])
              .lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
  }
}

TEST_CASE("difference quotients converge to the tangent") {
  const StateProblem p = testing::reference_problem(4, 0.25, 10);
  const StateTrajectory traj = solve_state(p);
  std::mt19937_64 rng(71);
  const Control h = testing::random_control(*p.mesh, p.M, 0.5, rng);
  const LinearizedTrajectory lin = solve_linearized(p, traj, h);
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {1e-2, 1e-3, 1e-4}) {
    const double mismatch = difference_quotient_mismatch(p, traj, lin, h, lambda);
    CHECK(mismatch < previous);
    previous = mismatch;
  }
}

TEST_CASE("tangent matches the monolithic dense oracle") {
  const StateProblem p = small_reference();
  const StateTrajectory traj = solve_state(p);
  std::mt19937_64 rng(73);
  const Control h = testing::random_control(*p.mesh, p.M, 1.0, rng);
  const LinearizedTrajectory lin = solve_linearized(p, traj, h);
  const LinearizedTrajectory oracle = testing::dense_linearized_oracle(p, traj, h);
  for (int k = 0; k <= p.M; ++k) {
    CHECK((lin.udot[static_cast<size_t>(k)] - oracle.udot[static_cast<size_t>(k)])
              .lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK((lin.chidot[static_cast<size_t>(k)] - oracle.chidot[static_cast<size_t>(k)])
              .lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("rate coefficients follow the stored convention") {
  MaterialLaw law;
  law.gamma_xi = 4.0;
  law.eps_xi = 0.1;
  const int m = 3;
  auto make_traj = [&](double rate) {
    StateTrajectory traj;
    traj.tau = 0.1;
    for (int k = 0; k <= 4; ++k)
      traj.chi.push_back(Vec::Constant(m, 1.0 + rate * k * traj.tau));
    traj.u.assign(5, Vec::Zero(2 * m));
    traj.v.assign(5, Vec::Zero(2 * m));
    finalize_trajectory(traj);
    return traj;
  };
  // constant in time: all coefficients vanish
  auto flat = compute_coefficients(make_traj(0.0), law);
  for (const auto& a : flat.a) CHECK(a.lpNorm<Eigen::Infinity>() == 0.0);
  for (const auto& b : flat.b_coef) CHECK(b.lpNorm<Eigen::Infinity>() == 0.0);
  // decreasing damage: xi' sees a negative rate and stays zero
  auto healing = compute_coefficients(make_traj(-0.5), law);
  for (const auto& a : healing.a) CHECK(a.lpNorm<Eigen::Infinity>() == 0.0);
  // fast growth beyond the ramp saturates at gamma
  auto growing = compute_coefficients(make_traj(5.0 * law.eps_xi), law);
  for (const auto& a : growing.a)
    CHECK((a.array() - law.gamma_xi).abs().maxCoeff() <= 1e-12);
  // fewer than two steps rejected
  StateTrajectory tiny;
  tiny.tau = 0.1;
  tiny.chi.assign(2, Vec::Zero(m));
  tiny.u.assign(2, Vec::Zero(2 * m));
  tiny.v.assign(2, Vec::Zero(2 * m));
  finalize_trajectory(tiny);
  CHECK_THROWS_AS(compute_coefficients(tiny, law), MeshError);
}

TEST_CASE("rate coefficient a stays nonnegative on computed trajectories") {
  const StateProblem p = testing::reference_problem(3, 0.3, 8);
  const StateTrajectory traj = solve_state(p);
  const CoefficientTrajectory coef = compute_coefficients(traj, p.law);
  for (const auto& a : coef.a) CHECK((a.array() >= 0.0).all());
}

TEST_CASE("zero tracking weight gives the zero adjoint") {
  const StateProblem p = testing::reference_problem(3, 0.3, 6);
  const StateTrajectory traj = solve_state(p);
  const Vec chi_T = testing::target_field(*p.mesh, [](double x, double) { return 0.5 + x; });
  const AdjointTrajectory adj = solve_adjoint(p, traj, chi_T, 0.0);
  for (int k = 0; k <= p.M; ++k) {
    CHECK(adj.p[static_cast<size_t>(k)].lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(adj.q[static_cast<size_t>(k)].lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("constant offset with a stationary state rides the stiffness kernel") {
  const StateProblem p = testing::stationary_problem(4, 0.5, 8);
  const StateTrajectory traj = solve_state(p);
  const double kappa = 0.3;
  const double lambda_T = 2.0;
  const Vec chi_T = traj.chi.back().array() - kappa;
  const AdjointTrajectory adj = solve_adjoint(p, traj, chi_T, lambda_T);
  for (int k = 0; k <= p.M; ++k) {
    CHECK((adj.q[static_cast<size_t>(k)].array() - lambda_T * kappa).abs().maxCoeff() <= 1e-10);
    CHECK(adj.p[static_cast<size_t>(k)].lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("violent damage oscillation leaves the q-step solvable") {
  // rates inside the penalty ramp with alternating sign make the
  // xi''-weighted term large and the q-step operator indefinite; the
  // minimum-residual solve still goes through
  StateProblem p = testing::reference_problem(3, 0.1, 6);
  p.law.gamma_xi = 1e4;
  p.law.eps_xi = 1e-3;
  StateTrajectory traj;
  traj.tau = p.tau();
  const int m = p.mesh->num_vertices();
  const double step = 0.5 * p.law.eps_xi * traj.tau;
  for (int k = 0; k <= p.M; ++k) {
    traj.chi.push_back(Vec::Constant(m, 0.5 + step * ((k % 2) ? 1.0 : 0.0)));
    traj.u.push_back(Vec::Zero(2 * m));
    traj.v.push_back(Vec::Zero(2 * m));
  }
  finalize_trajectory(traj);
  const Vec chi_T = Vec::Constant(m, 0.3);
  const AdjointTrajectory adj = solve_adjoint(p, traj, chi_T, 1.0);
  CHECK(adj.q.back().allFinite());
  CHECK(adj.q.back().lpNorm<Eigen::Infinity>() > 0.0);

  // a starved linear solver reports which adjoint solve failed
  p.stepper.linear_max_iters = 1;
  try {
    (void)solve_adjoint(p, traj, chi_T, 1.0);
    FAIL("expected SolveError");
  } catch (const SolveError& err) {
    CHECK(std::string(err.what()).find("adjoint") != std::string::npos);
  }
}

TEST_CASE("final-time momentum adjoint vanishes exactly") {
  const StateProblem p = testing::reference_problem(3, 0.3, 6);
  const StateTrajectory traj = solve_state(p);
  const Vec chi_T = testing::target_field(*p.mesh, [](double, double) { return 0.4; });
  const AdjointTrajectory adj = solve_adjoint(p, traj, chi_T, 1.0);
  CHECK(adj.p.back().lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("adjoint matches the monolithic dense oracle") {
  const StateProblem p = small_reference();
  const StateTrajectory traj = solve_state(p);
  const Vec chi_T = testing::target_field(*p.mesh, [](double x, double y) { return 0.4 + 0.2 * x - 0.1 * y; });
  const AdjointTrajectory adj = solve_adjoint(p, traj, chi_T, 1.5);
  const AdjointTrajectory oracle = testing::dense_adjoint_oracle(p, traj, chi_T, 1.5);
  for (int k = 0; k <= p.M; ++k) {
    CHECK((adj.p[static_cast<size_t>(k)] - oracle.p[static_cast<size_t>(k)])
              .lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK((adj.q[static_cast<size_t>(k)] - oracle.q[static_cast<size_t>(k)])
              .lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("adjoint is linear in the tracking data") {
  const StateProblem p = testing::reference_problem(3, 0.3, 6);
  const StateTrajectory traj = solve_state(p);
  const Vec chi_T = testing::target_field(*p.mesh, [](double x, double y) { return x * y; });
  const AdjointTrajectory a1 = solve_adjoint(p, traj, chi_T, 1.0);
  const AdjointTrajectory a2 = solve_adjoint(p, traj, chi_T, 2.0);
  for (int k = 0; k <= p.M; ++k) {
    const double scale =
        std::max(1e-12, a1.q[static_cast<size_t>(k)].lpNorm<Eigen::Infinity>());
    CHECK((a2.q[static_cast<size_t>(k)] - 2.0 * a1.q[static_cast<size_t>(k)])
              .lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(1.0, scale));
    CHECK((a2.p[static_cast<size_t>(k)] - 2.0 * a1.p[static_cast<size_t>(k)])
              .lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("pairing identities") {
  const StateProblem p = testing::reference_problem(3, 0.3, 6);
  const StateTrajectory traj = solve_state(p);
  std::mt19937_64 rng(79);
  const Control h = testing::random_control(*p.mesh, p.M, 0.7, rng);
  // zero direction pairs to zero
  const Vec chi_T = testing::target_field(*p.mesh, [](double, double) { return 0.5; });
  const AdjointTrajectory adj = solve_adjoint(p, traj, chi_T, 1.0);
  CHECK(pair_gradient(p, adj, Control::zero(*p.mesh, p.M), p.control, 2.0) == 0.0);
  // with p = 0 the pairing is the pure penalty term
  AdjointTrajectory zero = adj;
  for (auto& v : zero.p) v.setZero();
  const double got = pair_gradient(p, zero, h, h, 2.0);
  CHECK(got == doctest::Approx(2.0 * inner_sigma(*p.mesh, p.T, h, h)).epsilon(1e-12));
}

TEST_CASE("adjoint and linearized pairings approximate the same derivative") {
  // coarse level of the duality comparison; the acceptance suite tracks the
  // refinement trend
  const StateProblem p = testing::reference_problem(4, 0.5, 10);
  const StateTrajectory traj = solve_state(p);
  const Control h = testing::profile_direction(p);
  const Vec chi_T = testing::target_field(*p.mesh, [](double x, double y) { return 0.5 + 0.1 * x * y; });
  const double lT = 1.0, lS = 1e-3;
  const LinearizedTrajectory lin = solve_linearized(p, traj, h);
  const AdjointTrajectory adj = solve_adjoint(p, traj, chi_T, lT);
  const double lin_pairing = linearized_pairing(p, traj, lin, h, chi_T, lT, lS);
  const double adj_pairing = pair_gradient(p, adj, h, p.control, lS);
  CHECK(std::abs(adj_pairing - lin_pairing) <= 0.10 * std::abs(lin_pairing));
}
