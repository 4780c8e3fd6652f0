// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_STATE_HPP
#define DAMCTL_STATE_HPP

#include <memory>
#include <vector>

#include "damctl/control.hpp"
#include "damctl/geometry.hpp"
#include "damctl/linalg.hpp"
#include "damctl/material.hpp"

namespace damctl {

class NewtonError : public std::runtime_error {
public:
  NewtonError(const std::string& what, int step, double residual)
      : std::runtime_error(what), step(step), residual(residual) {}
  int step;
  double residual;
};

struct StepperConfig {
  double linear_rtol = 1e-12;   ///< tolerance of the per-step linear solves
  int linear_max_iters = 0;     ///< 0 = sized from the problem
  double newton_rtol = 1e-12;
  double newton_atol = 1e-13;
  int newton_max_iters = 50;
  bool smooth_rates = false;    ///< 3-point moving average on chi_t / chi_tt
};

/// The coupled evolution problem: damage-dependent viscoelastic momentum
/// balance driven by volume forces and boundary tractions, plus the damage
/// flow rule with rate penalty. Time grid: M steps of length tau = T / M.
struct StateProblem {
  std::shared_ptr<const TriangleMesh2D> mesh;
  MaterialLaw law;
  double T = 1.0;
  int M = 1;
  std::vector<Vec> ell;  ///< volume force per time node, interleaved 2m (may be empty = zero)
  Control control;
  Vec u0, v0, chi0;
  StepperConfig stepper;

  double tau() const { return T / M; }
  void validate() const;
};

struct StateTrajectory {
  double tau = 0.0;
  std::vector<Vec> u;       // 0..M, interleaved 2m
  std::vector<Vec> v;       // v[k] = (u[k]-u[k-1])/tau, v[0] = v0
  std::vector<Vec> chi;     // 0..M
  std::vector<Vec> chi_t;   // backward difference quotients, forward copy at k=0
  std::vector<Vec> chi_tt;  // second differences, one-sided at the ends

  int num_steps() const { return static_cast<int>(u.size()) - 1; }
};

/// Semi-implicit splitting per step: first the damage sub-problem, implicit
/// in chi with the mechanical coupling lagged at the previous step, solved
/// by damped Newton; then the linear viscoelastic sub-problem with the fresh
/// stiffness factor. The rate penalty acts through the lumped mass so the
/// Newton nonlinearity stays diagonal.
StateTrajectory solve_state(const StateProblem& problem);

/// Derives v, chi_t, chi_tt from u/chi (used after loading checkpoints).
void finalize_trajectory(StateTrajectory& traj);

/// Tracking cost: lambda_T/2 ||chi(T) - chi_T||^2_M + lambda_Sigma/2 ||b||^2_Sigma.
double evaluate_cost(const StateProblem& problem, const StateTrajectory& traj, const Control& b,
                     const Vec& chi_T, double lambda_T, double lambda_Sigma);

/// Discrete norms of trajectory differences used by the stability probes:
/// L2-in-time H1 norms of the fields and their difference quotients plus the
/// sup-in-time L2 norm of the velocity.
double state_difference_norm(const StateProblem& problem, const StateTrajectory& a,
                             const StateTrajectory& b);

/// ||S(b1) - S(b2)|| / ||b1 - b2||_Sigma ; rejects identical controls.
double lipschitz_probe(const StateProblem& problem, const Control& b1, const Control& b2);

/// \int_Q max(chi_t, 0) by lumped mass in space, rectangle rule in time.
double healing_volume(const StateProblem& problem, const StateTrajectory& traj);

}  // namespace damctl

#endif
