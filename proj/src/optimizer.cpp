// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/optimizer.hpp"

#include <cmath>
#include <cstdio>

#include "damctl/assembly.hpp"

namespace damctl {

void OptimizeConfig::validate() const {
  if (max_iters < 0 || max_backtracks < 1) throw MeshError("optimizer: invalid iteration caps");
  if (!(initial_step > 0.0) || !(backtrack > 0.0) || backtrack >= 1.0)
    throw MeshError("optimizer: invalid step parameters");
  if (!(vi_tolerance >= 0.0)) throw MeshError("optimizer: invalid tolerance");
  if (lambda_T < 0.0 || lambda_Sigma < 0.0)
    throw MeshError("optimizer: cost weights must be non-negative (O1)");
}

double reduced_cost(const StateProblem& problem, const Control& b, const Vec& chi_T,
                    double lambda_T, double lambda_Sigma) {
  StateProblem p = problem;
  p.control = b;
  const StateTrajectory traj = solve_state(p);
  return evaluate_cost(p, traj, b, chi_T, lambda_T, lambda_Sigma);
}

Control reduced_gradient(const StateProblem& problem, const Control& b, const Vec& chi_T,
                         double lambda_T, double lambda_Sigma, double* cost_out) {
  StateProblem p = problem;
  p.control = b;
  const StateTrajectory traj = solve_state(p);
  if (cost_out) *cost_out = evaluate_cost(p, traj, b, chi_T, lambda_T, lambda_Sigma);
  const AdjointTrajectory adj = solve_adjoint(p, traj, chi_T, lambda_T);
  Control g = b;  // same shape and bounds
  for (int k = 0; k <= p.M; ++k)
    g.values[static_cast<size_t>(k)] =
        restrict_to_boundary(*p.mesh, adj.p[static_cast<size_t>(k)]) +
        lambda_Sigma * b.values[static_cast<size_t>(k)];
  return g;
}

double vi_residual(const TriangleMesh2D& mesh, double T, const Control& b, const Control& g,
                   double step) {
  Control trial = b;
  for (size_t k = 0; k < trial.values.size(); ++k) trial.values[k] -= step * g.values[k];
  trial.b_min = b.b_min;
  trial.b_max = b.b_max;
  trial.project();
  return norm_sigma(mesh, T, b - trial) / step;
}

OptimizeResult optimize(const StateProblem& problem, const Vec& chi_T,
                        const OptimizeConfig& config) {
  config.validate();
  const TriangleMesh2D& mesh = *problem.mesh;

  OptimizeResult result;
  Control b = problem.control.projected();
  double cost = 0.0;
  Control g = reduced_gradient(problem, b, chi_T, config.lambda_T, config.lambda_Sigma, &cost);
  double vi = vi_residual(mesh, problem.T, b, g);
  result.history.push_back({0, cost, vi, norm_B(b, mesh, problem.T).total, 0.0});

  double step_seed = config.initial_step;
  int iter = 0;
  while (vi > config.vi_tolerance && iter < config.max_iters) {
    ++iter;
    double s = step_seed;
    bool accepted = false;
    Control b_new = b;
    double cost_new = cost;
    for (int bt = 0; bt < config.max_backtracks; ++bt) {
      Control trial = b;
      for (size_t k = 0; k < trial.values.size(); ++k) trial.values[k] -= s * g.values[k];
      trial.project();
      // directional decrease along the projection arc
      double slope = inner_sigma(mesh, problem.T, g, trial - b);
      if (slope >= 0.0) {
        s *= config.backtrack;
        continue;
      }
      const double j_trial =
          reduced_cost(problem, trial, chi_T, config.lambda_T, config.lambda_Sigma);
      if (j_trial <= cost + config.armijo_c1 * slope) {
        b_new = trial;
        cost_new = j_trial;
        accepted = true;
        break;
      }
      s *= config.backtrack;
    }
    if (!accepted) {
      result.stalled = true;
      break;
    }
    Control g_new =
        reduced_gradient(problem, b_new, chi_T, config.lambda_T, config.lambda_Sigma, nullptr);
    // Barzilai-Borwein step seed for the next iteration, safeguarded by the
    // Armijo loop above; falls back to doubling the accepted step
    const Control db = b_new - b;
    const Control dg = g_new - g;
    const double sy = inner_sigma(mesh, problem.T, db, dg);
    const double ss = inner_sigma(mesh, problem.T, db, db);
    if (sy > 0.0 && std::isfinite(sy) && ss > 0.0) {
      step_seed = std::min(std::max(ss / sy, 1e-6 * config.initial_step),
                           1e6 * config.initial_step);
    } else {
      step_seed = std::min(config.initial_step, 2.0 * s);
    }
    b = b_new;
    cost = cost_new;
    g = g_new;
    result.all_feasible = result.all_feasible && b.feasible(0.0);
    vi = vi_residual(mesh, problem.T, b, g);
    const double b_norm = norm_B(b, mesh, problem.T).total;
    if (b_norm > b.radius) {
      // the radius of the control-space ball is monitored, not projected
      std::fprintf(stderr,
                   "optimize: control-space norm %.6g exceeds the monitored radius %.6g "
                   "at iteration %d\n",
                   b_norm, b.radius, iter);
      ++result.radius_violations;
    }
    result.history.push_back({iter, cost, vi, b_norm, s});
  }

  result.control = b;
  result.cost = cost;
  result.vi_residual = vi;
  result.converged = vi <= config.vi_tolerance;
  return result;
}

}  // namespace damctl
