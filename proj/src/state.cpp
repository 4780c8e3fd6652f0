// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/state.hpp"

#include <cmath>

#include "damctl/assembly.hpp"

namespace damctl {

void StateProblem::validate() const {
  if (!mesh) throw MeshError("state problem: missing mesh");
  mesh->validate();
  if (!(T > 0.0) || M < 1) throw MeshError("state problem: need T > 0 and M >= 1");
  const int m = mesh->num_vertices();
  const int nb = mesh->num_boundary_vertices();
  if (u0.size() != 2 * m || v0.size() != 2 * m || chi0.size() != m)
    throw MeshError("state problem: initial fields do not match the mesh");
  if (!u0.allFinite() || !v0.allFinite() || !chi0.allFinite())
    throw MeshError("state problem: initial fields must be finite");
  if (!ell.empty()) {
    if (static_cast<int>(ell.size()) != M + 1)
      throw MeshError("state problem: volume force needs one slice per time node");
    for (const auto& l : ell)
      if (l.size() != 2 * m) throw MeshError("state problem: volume force has wrong length");
  }
  if (control.num_time_nodes() != M + 1)
    throw MeshError("state problem: control time grid does not match M");
  if (control.num_boundary_dofs() != 2 * nb)
    throw MeshError("state problem: control does not match the boundary");
  auto report = damctl::validate(law);
  if (!report.ok())
    throw MeshError("state problem: material law violates " + report.issues.front().tag + ": " +
                    report.issues.front().message);
}

namespace {

Vec smooth3(const Vec& a, const Vec& b, const Vec& c) { return (a + b + c) / 3.0; }

}  // namespace

void finalize_trajectory(StateTrajectory& traj) {
  const int M = traj.num_steps();
  const double tau = traj.tau;
  traj.chi_t.assign(static_cast<size_t>(M + 1), Vec());
  traj.chi_tt.assign(static_cast<size_t>(M + 1), Vec());
  for (int k = 1; k <= M; ++k)
    traj.chi_t[static_cast<size_t>(k)] =
        (traj.chi[static_cast<size_t>(k)] - traj.chi[static_cast<size_t>(k - 1)]) / tau;
  traj.chi_t[0] = M >= 1 ? traj.chi_t[1] : Vec::Zero(traj.chi[0].size());
  if (M >= 2) {
    for (int k = 1; k < M; ++k)
      traj.chi_tt[static_cast<size_t>(k)] =
          (traj.chi[static_cast<size_t>(k + 1)] - 2.0 * traj.chi[static_cast<size_t>(k)] +
           traj.chi[static_cast<size_t>(k - 1)]) /
          (tau * tau);
    traj.chi_tt[0] = traj.chi_tt[1];
    traj.chi_tt[static_cast<size_t>(M)] = traj.chi_tt[static_cast<size_t>(M - 1)];
  } else {
    traj.chi_tt[0] = Vec::Zero(traj.chi[0].size());
    traj.chi_tt[1] = traj.chi_tt[0];
  }
}

StateTrajectory solve_state(const StateProblem& problem) {
  problem.validate();
  const TriangleMesh2D& mesh = *problem.mesh;
  const MaterialLaw& law = problem.law;
  const int M = problem.M;
  const double tau = problem.tau();
  const int m = mesh.num_vertices();

  const SpMat Ms = assemble_mass(mesh);
  const Vec ML = assemble_lumped_mass(mesh);
  const SpMat K = assemble_stiffness(mesh);
  const SpMat Mv = assemble_vector_mass(mesh);
  const SpMat E1 = assemble_elasticity(mesh, Vec::Ones(m), law.lame);

  const SolveOptions lin{problem.stepper.linear_rtol, problem.stepper.linear_max_iters};

  StateTrajectory traj;
  traj.tau = tau;
  traj.u.assign(static_cast<size_t>(M + 1), Vec());
  traj.v.assign(static_cast<size_t>(M + 1), Vec());
  traj.chi.assign(static_cast<size_t>(M + 1), Vec());
  traj.u[0] = problem.u0;
  traj.v[0] = problem.v0;
  traj.chi[0] = problem.chi0;

  Vec u_prev2 = problem.u0 - tau * problem.v0;  // ghost u^{-1}

  for (int k = 1; k <= M; ++k) {
    const Vec& chi_prev = traj.chi[static_cast<size_t>(k - 1)];
    const Vec& u_prev = traj.u[static_cast<size_t>(k - 1)];

    // damage sub-problem: implicit in chi, coupling lagged at (chi_prev, u_prev)
    const Vec coupling = 0.5 * assemble_coupling_load(mesh, law.dc_of(chi_prev), u_prev, law.lame);
    auto residual = [&](const Vec& chi) -> Vec {
      const Vec rate = (chi - chi_prev) / tau;
      return Ms * rate + ML.cwiseProduct(law.xi_of(rate)) + K * (rate + chi) + coupling +
             Ms * law.df_of(chi);
    };
    Vec chi = chi_prev;
    Vec F = residual(chi);
    const double f0 = F.lpNorm<Eigen::Infinity>();
    const double tol = std::max(problem.stepper.newton_atol, problem.stepper.newton_rtol * f0);
    int it = 0;
    while (F.lpNorm<Eigen::Infinity>() > tol) {
      if (it++ >= problem.stepper.newton_max_iters)
        throw NewtonError("damage Newton stalled at step " + std::to_string(k) +
                              ", residual " + std::to_string(F.lpNorm<Eigen::Infinity>()),
                          k, F.lpNorm<Eigen::Infinity>());
      const Vec rate = (chi - chi_prev) / tau;
      SpMat J = Ms / tau + K * (1.0 + 1.0 / tau);
      const Vec dxi_diag = ML.cwiseProduct(law.dxi_of(rate)) / tau;
      J += SpMat(dxi_diag.asDiagonal());
      const Vec ddf = law.ddf_of(chi);
      if ((ddf.array() != 0.0).any()) J += SpMat(Ms * ddf.asDiagonal());
      const Vec delta = solve_auto(J, -F, lin);
      // damp: halve until the residual decreases
      double s = 1.0;
      const double fnorm = F.lpNorm<Eigen::Infinity>();
      Vec chi_try, F_try;
      for (;;) {
        chi_try = chi + s * delta;
        F_try = residual(chi_try);
        if (F_try.lpNorm<Eigen::Infinity>() < fnorm || s < std::ldexp(1.0, -20)) break;
        s *= 0.5;
      }
      if (F_try.lpNorm<Eigen::Infinity>() >= fnorm)
        throw NewtonError("damage Newton damping floor at step " + std::to_string(k), k, fnorm);
      chi = chi_try;
      F = F_try;
    }
    traj.chi[static_cast<size_t>(k)] = chi;

    // viscoelastic sub-problem, linear SPD
    SpMat A = Mv / (tau * tau) + assemble_elasticity(mesh, law.c_of(chi), law.lame) +
              (law.mu_visc / tau) * E1;
    Vec rhs = Mv * ((2.0 * u_prev - u_prev2) / (tau * tau)) + (law.mu_visc / tau) * (E1 * u_prev) +
              assemble_boundary_load(mesh, problem.control.values[static_cast<size_t>(k)]);
    if (!problem.ell.empty()) rhs += Mv * problem.ell[static_cast<size_t>(k)];
    Vec u = solve_spd(A, rhs, lin);
    traj.u[static_cast<size_t>(k)] = u;
    traj.v[static_cast<size_t>(k)] = (u - u_prev) / tau;
    u_prev2 = u_prev;
  }
  finalize_trajectory(traj);
  if (problem.stepper.smooth_rates) {
    auto smooth_series = [&](std::vector<Vec>& s) {
      const std::vector<Vec> orig = s;
      for (int k = 1; k < M; ++k)
        s[static_cast<size_t>(k)] = smooth3(orig[static_cast<size_t>(k - 1)],
                                            orig[static_cast<size_t>(k)],
                                            orig[static_cast<size_t>(k + 1)]);
    };
    smooth_series(traj.chi_t);
    smooth_series(traj.chi_tt);
  }
  return traj;
}

double evaluate_cost(const StateProblem& problem, const StateTrajectory& traj, const Control& b,
                     const Vec& chi_T, double lambda_T, double lambda_Sigma) {
  const TriangleMesh2D& mesh = *problem.mesh;
  if (chi_T.size() != mesh.num_vertices())
    throw MeshError("evaluate_cost: target does not match the mesh");
  const Vec diff = traj.chi.back() - chi_T;
  const SpMat Ms = assemble_mass(mesh);
  double cost = 0.5 * lambda_T * diff.dot(Ms * diff);
  if (lambda_Sigma != 0.0) cost += 0.5 * lambda_Sigma * inner_sigma(mesh, problem.T, b, b);
  return cost;
}

double state_difference_norm(const StateProblem& problem, const StateTrajectory& a,
                             const StateTrajectory& b) {
  const TriangleMesh2D& mesh = *problem.mesh;
  const SpMat Ms = assemble_mass(mesh);
  const SpMat K = assemble_stiffness(mesh);
  const double tau = problem.tau();
  const int M = problem.M;
  auto h1_sq = [&](const Vec& scalar) { return scalar.dot(Ms * scalar) + scalar.dot(K * scalar); };
  auto h1_sq_vec = [&](const Vec& vec) {
    double s = 0.0;
    for (int d = 0; d < 2; ++d) s += h1_sq(component(vec, d));
    return s;
  };
  double u_part = 0.0, chi_part = 0.0, v_sup = 0.0;
  const SpMat Mv = assemble_vector_mass(mesh);
  for (int k = 0; k <= M; ++k) {
    const double w = (k == 0 || k == M) ? 0.5 * tau : tau;
    const Vec du = a.u[static_cast<size_t>(k)] - b.u[static_cast<size_t>(k)];
    const Vec dchi = a.chi[static_cast<size_t>(k)] - b.chi[static_cast<size_t>(k)];
    u_part += w * h1_sq_vec(du);
    chi_part += w * h1_sq(dchi);
    if (k >= 1) {
      const Vec dv = a.v[static_cast<size_t>(k)] - b.v[static_cast<size_t>(k)];
      const Vec drate = a.chi_t[static_cast<size_t>(k)] - b.chi_t[static_cast<size_t>(k)];
      u_part += tau * h1_sq_vec(dv);
      chi_part += tau * h1_sq(drate);
      v_sup = std::max(v_sup, std::sqrt(dv.dot(Mv * dv)));
    }
  }
  return std::sqrt(u_part) + std::sqrt(chi_part) + v_sup;
}

double lipschitz_probe(const StateProblem& problem, const Control& b1, const Control& b2) {
  const double denom = norm_sigma(*problem.mesh, problem.T, b1 - b2);
  if (denom == 0.0) throw MeshError("lipschitz_probe: identical controls");
  StateProblem p1 = problem;
  p1.control = b1;
  StateProblem p2 = problem;
  p2.control = b2;
  const StateTrajectory t1 = solve_state(p1);
  const StateTrajectory t2 = solve_state(p2);
  return state_difference_norm(problem, t1, t2) / denom;
}

double healing_volume(const StateProblem& problem, const StateTrajectory& traj) {
  const Vec ML = assemble_lumped_mass(*problem.mesh);
  double total = 0.0;
  for (int k = 1; k <= traj.num_steps(); ++k)
    total += traj.tau * ML.dot(traj.chi_t[static_cast<size_t>(k)].cwiseMax(0.0));
  return total;
}

}  // namespace damctl
