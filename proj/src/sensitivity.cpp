// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/sensitivity.hpp"

#include <cmath>

#include "damctl/assembly.hpp"

namespace damctl {

LinearizedTrajectory solve_linearized(const StateProblem& problem, const StateTrajectory& traj,
                                      const Control& h) {
  problem.validate();
  if (traj.num_steps() != problem.M || std::abs(traj.tau - problem.tau()) > 1e-14 * problem.T)
    throw MeshError("solve_linearized: trajectory does not match the problem");
  if (h.num_time_nodes() != problem.M + 1 ||
      h.num_boundary_dofs() != 2 * problem.mesh->num_boundary_vertices())
    throw MeshError("solve_linearized: direction does not match the problem");

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

  LinearizedTrajectory out;
  out.udot.assign(static_cast<size_t>(M + 1), Vec::Zero(2 * m));
  out.chidot.assign(static_cast<size_t>(M + 1), Vec::Zero(m));
  Vec udot_prev2 = Vec::Zero(2 * m);  // tangent of the ghost u^{-1} is zero

  for (int k = 1; k <= M; ++k) {
    const Vec& chi_prev = traj.chi[static_cast<size_t>(k - 1)];
    const Vec& chi_k = traj.chi[static_cast<size_t>(k)];
    const Vec& u_prev = traj.u[static_cast<size_t>(k - 1)];
    const Vec& u_k = traj.u[static_cast<size_t>(k)];
    const Vec& chidot_prev = out.chidot[static_cast<size_t>(k - 1)];
    const Vec& udot_prev = out.udot[static_cast<size_t>(k - 1)];

    // damage tangent: J_k chidot^k = (M + ML xi' + K)/tau chidot^{k-1} - dL
    const Vec rate = (chi_k - chi_prev) / tau;
    const Vec dxi = law.dxi_of(rate);
    SpMat J = Ms / tau + K * (1.0 + 1.0 / tau);
    const Vec dxi_diag = ML.cwiseProduct(dxi) / tau;
    J += SpMat(dxi_diag.asDiagonal());
    const Vec ddf = law.ddf_of(chi_k);
    if ((ddf.array() != 0.0).any()) J += SpMat(Ms * ddf.asDiagonal());

    Vec rhs = Ms * (chidot_prev / tau) + ML.cwiseProduct(dxi.cwiseProduct(chidot_prev)) / tau +
              K * (chidot_prev / tau);
    rhs -= 0.5 * assemble_coupling_load(mesh, law.ddc_of(chi_prev).cwiseProduct(chidot_prev),
                                        u_prev, law.lame);
    rhs -= assemble_coupling(mesh, law.dc_of(chi_prev), u_prev, law.lame).transpose() * udot_prev;
    const Vec chidot = solve_auto(J, rhs, lin);
    out.chidot[static_cast<size_t>(k)] = chidot;

    // elasticity tangent with the fresh stiffness-coefficient derivative
    SpMat A = Mv / (tau * tau) + assemble_elasticity(mesh, law.c_of(chi_k), law.lame) +
              (law.mu_visc / tau) * E1;
    Vec rhs_u = Mv * ((2.0 * udot_prev - udot_prev2) / (tau * tau)) +
                (law.mu_visc / tau) * (E1 * udot_prev) +
                assemble_boundary_load(mesh, h.values[static_cast<size_t>(k)]);
    // d/dchi [E(c(chi)) u] in direction chidot
    const Vec dcoef = law.dc_of(chi_k).cwiseProduct(chidot);
    rhs_u -= assemble_elasticity_signed(mesh, dcoef, law.lame) * u_k;
    out.udot[static_cast<size_t>(k)] = solve_spd(A, rhs_u, lin);
    udot_prev2 = udot_prev;
  }
  return out;
}

CoefficientTrajectory compute_coefficients(const StateTrajectory& traj, const MaterialLaw& law) {
  const int M = traj.num_steps();
  if (M < 2) throw MeshError("compute_coefficients: needs M >= 2");
  CoefficientTrajectory out;
  out.a.resize(static_cast<size_t>(M + 1));
  out.b_coef.resize(static_cast<size_t>(M + 1));
  for (int k = 0; k <= M; ++k) {
    const int orig = M - k;
    const Vec& rate = traj.chi_t[static_cast<size_t>(orig)];
    out.a[static_cast<size_t>(k)] = law.dxi_of(rate);
    out.b_coef[static_cast<size_t>(k)] =
        law.ddxi_of(rate).cwiseProduct(traj.chi_tt[static_cast<size_t>(orig)]);
  }
  return out;
}

AdjointTrajectory solve_adjoint(const StateProblem& problem, const StateTrajectory& traj,
                                const Vec& chi_T, double lambda_T) {
  problem.validate();
  if (traj.num_steps() != problem.M)
    throw MeshError("solve_adjoint: trajectory does not match the problem");
  const TriangleMesh2D& mesh = *problem.mesh;
  const MaterialLaw& law = problem.law;
  const int M = problem.M;
  const double tau = problem.tau();
  const int m = mesh.num_vertices();
  if (chi_T.size() != m) throw MeshError("solve_adjoint: target does not match the mesh");

  const SpMat Ms = assemble_mass(mesh);
  const Vec ML = assemble_lumped_mass(mesh);
  const SpMat K = assemble_stiffness(mesh);
  const SpMat Mv = assemble_vector_mass(mesh);
  const SpMat E1 = assemble_elasticity(mesh, Vec::Ones(m), law.lame);
  const SolveOptions lin{problem.stepper.linear_rtol, problem.stepper.linear_max_iters};

  const CoefficientTrajectory coef = compute_coefficients(traj, law);

  // reversed time: slice k pairs with original node M - k
  auto chi_at = [&](int k) -> const Vec& { return traj.chi[static_cast<size_t>(M - k)]; };
  auto u_at = [&](int k) -> const Vec& { return traj.u[static_cast<size_t>(M - k)]; };

  std::vector<Vec> p(static_cast<size_t>(M + 1));
  std::vector<Vec> q(static_cast<size_t>(M + 1));
  p[0] = Vec::Zero(2 * m);

  // final-time elliptic problem for q
  {
    SpMat A = K + Ms;
    const Vec a0 = ML.cwiseProduct(coef.a[0]);
    A += SpMat(a0.asDiagonal());
    const Vec rhs = lambda_T * (Ms * (traj.chi.back() - chi_T));
    try {
      q[0] = solve_spd(A, rhs, lin);
    } catch (const SolveError& err) {
      throw SolveError(std::string("adjoint final-time solve failed: ") + err.what(),
                       err.residual, err.iterations);
    }
  }

  Vec p_prev2 = Vec::Zero(2 * m);  // ghost p^{-1} = 0
  for (int k = 1; k <= M; ++k) {
    const Vec dc = law.dc_of(chi_at(k));
    const SpMat B = assemble_coupling(mesh, dc, u_at(k), law.lame);

    // momentum adjoint: SPD operator shared with the forward stepping
    SpMat A_p = Mv / (tau * tau) + assemble_elasticity(mesh, law.c_of(chi_at(k)), law.lame) +
                (law.mu_visc / tau) * E1;
    const Vec& p_prev = p[static_cast<size_t>(k - 1)];
    Vec rhs_p = Mv * ((2.0 * p_prev - p_prev2) / (tau * tau)) +
                (law.mu_visc / tau) * (E1 * p_prev) - B * q[static_cast<size_t>(k - 1)];
    try {
      p[static_cast<size_t>(k)] = solve_spd(A_p, rhs_p, lin);
    } catch (const SolveError& err) {
      throw SolveError("adjoint momentum solve failed at reversed step " + std::to_string(k) +
                           ": " + err.what(),
                       err.residual, err.iterations);
    }
    p_prev2 = p_prev;

    // damage adjoint: symmetric, may lose definiteness through the
    // xi''-term, handled by the minimum-residual solver
    SpMat A_q = (Ms + K) / tau + K;
    const Vec a_diag = ML.cwiseProduct(coef.a[static_cast<size_t>(k)]) / tau;
    A_q += SpMat(a_diag.asDiagonal());
    const Vec b_diag = ML.cwiseProduct(coef.b_coef[static_cast<size_t>(k)]);
    A_q -= SpMat(b_diag.asDiagonal());
    A_q += 0.5 * assemble_strain_energy_mass(mesh, law.ddc_of(chi_at(k)), u_at(k), law.lame);
    const Vec ddf = law.ddf_of(chi_at(k));
    if ((ddf.array() != 0.0).any()) A_q += assemble_weighted_mass(mesh, ddf);
    Vec rhs_q = (Ms + K) * (q[static_cast<size_t>(k - 1)] / tau) +
                ML.cwiseProduct(coef.a[static_cast<size_t>(k)])
                        .cwiseProduct(q[static_cast<size_t>(k - 1)]) /
                    tau -
                B.transpose() * p[static_cast<size_t>(k)];
    try {
      q[static_cast<size_t>(k)] = solve_symmetric(A_q, rhs_q, lin);
    } catch (const SolveError& err) {
      throw SolveError("adjoint damage solve failed at reversed step " + std::to_string(k) +
                           " (original node " + std::to_string(M - k) + "): " + err.what(),
                       err.residual, err.iterations);
    }
  }

  AdjointTrajectory out;
  out.p.resize(static_cast<size_t>(M + 1));
  out.q.resize(static_cast<size_t>(M + 1));
  for (int k = 0; k <= M; ++k) {
    out.p[static_cast<size_t>(M - k)] = std::move(p[static_cast<size_t>(k)]);
    out.q[static_cast<size_t>(M - k)] = std::move(q[static_cast<size_t>(k)]);
  }
  return out;
}

double pair_gradient(const StateProblem& problem, const AdjointTrajectory& adj, const Control& h,
                     const Control& b, double lambda_Sigma) {
  const TriangleMesh2D& mesh = *problem.mesh;
  Control integrand = Control::zero(mesh, problem.M);
  for (int k = 0; k <= problem.M; ++k)
    integrand.values[static_cast<size_t>(k)] =
        restrict_to_boundary(mesh, adj.p[static_cast<size_t>(k)]) +
        lambda_Sigma * b.values[static_cast<size_t>(k)];
  return inner_sigma(mesh, problem.T, integrand, h);
}

double linearized_pairing(const StateProblem& problem, const StateTrajectory& traj,
                          const LinearizedTrajectory& lin, const Control& h, const Vec& chi_T,
                          double lambda_T, double lambda_Sigma) {
  const SpMat Ms = assemble_mass(*problem.mesh);
  const Vec diff = traj.chi.back() - chi_T;
  double val = lambda_T * diff.dot(Ms * lin.chidot.back());
  if (lambda_Sigma != 0.0)
    val += lambda_Sigma * inner_sigma(*problem.mesh, problem.T, problem.control, h);
  return val;
}

double linearized_norm(const StateProblem& problem, const LinearizedTrajectory& lin) {
  StateTrajectory a, b;
  a.tau = b.tau = problem.tau();
  a.u = lin.udot;
  a.chi = lin.chidot;
  const int m = problem.mesh->num_vertices();
  b.u.assign(a.u.size(), Vec::Zero(2 * m));
  b.chi.assign(a.chi.size(), Vec::Zero(m));
  finalize_trajectory(a);
  finalize_trajectory(b);
  a.v.resize(a.u.size());
  b.v.resize(b.u.size());
  a.v[0] = Vec::Zero(2 * m);
  b.v[0] = Vec::Zero(2 * m);
  for (size_t k = 1; k < a.u.size(); ++k) {
    a.v[k] = (a.u[k] - a.u[k - 1]) / a.tau;
    b.v[k] = Vec::Zero(2 * m);
  }
  return state_difference_norm(problem, a, b);
}

double difference_quotient_mismatch(const StateProblem& problem, const StateTrajectory& traj,
                                    const LinearizedTrajectory& lin, const Control& h,
                                    double lambda) {
  StateProblem shifted = problem;
  shifted.control = problem.control + lambda * h;
  const StateTrajectory t2 = solve_state(shifted);

  LinearizedTrajectory quotient;
  const int M = problem.M;
  quotient.udot.resize(static_cast<size_t>(M + 1));
  quotient.chidot.resize(static_cast<size_t>(M + 1));
  for (int k = 0; k <= M; ++k) {
    quotient.udot[static_cast<size_t>(k)] =
        (t2.u[static_cast<size_t>(k)] - traj.u[static_cast<size_t>(k)]) / lambda -
        lin.udot[static_cast<size_t>(k)];
    quotient.chidot[static_cast<size_t>(k)] =
        (t2.chi[static_cast<size_t>(k)] - traj.chi[static_cast<size_t>(k)]) / lambda -
        lin.chidot[static_cast<size_t>(k)];
  }
  return linearized_norm(problem, quotient);
}

}  // namespace damctl
