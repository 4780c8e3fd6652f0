// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_OPTIMIZER_HPP
#define DAMCTL_OPTIMIZER_HPP

#include <vector>

#include "damctl/sensitivity.hpp"
#include "damctl/state.hpp"

namespace damctl {

struct OptimizeConfig {
  int max_iters = 100;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 30;
  double initial_step = 1.0;
  double vi_tolerance = 1e-8;
  double lambda_T = 1.0;
  double lambda_Sigma = 1e-4;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double cost = 0.0;
  double vi_residual = 0.0;
  double b_norm = 0.0;  ///< control-space norm (monitored against the radius)
  double step = 0.0;    ///< accepted step length (0 on the initial record)
};

struct OptimizeResult {
  Control control;
  double cost = 0.0;
  double vi_residual = 0.0;
  std::vector<IterationRecord> history;
  bool stalled = false;
  bool converged = false;
  bool all_feasible = true;  ///< every accepted iterate satisfied the box exactly
  int radius_violations = 0;  ///< iterations whose control-space norm exceeded R
};

/// j(b) = cost of the state reached from b
double reduced_cost(const StateProblem& problem, const Control& b, const Vec& chi_T,
                    double lambda_T, double lambda_Sigma);

/// L2(Sigma) representative of the reduced gradient: boundary trace of the
/// adjoint momentum variable plus the control penalty. One state solve and
/// one adjoint solve.
Control reduced_gradient(const StateProblem& problem, const Control& b, const Vec& chi_T,
                         double lambda_T, double lambda_Sigma, double* cost_out = nullptr);

/// || b - P(b - s g) ||_Sigma / s  with s = 1 - the projected-gradient
/// fixed-point residual of the first-order condition.
double vi_residual(const TriangleMesh2D& mesh, double T, const Control& b, const Control& g,
                   double step = 1.0);

/// Projected gradient descent with Armijo backtracking along the projection
/// arc. Every accepted iterate is box-feasible and strictly decreases the
/// cost; the control-space norm is reported each iteration but the radius is
/// not enforced. Terminates on the VI residual or the iteration cap; a
/// failed line search returns the best iterate with the stall flag set.
OptimizeResult optimize(const StateProblem& problem, const Vec& chi_T,
                        const OptimizeConfig& config);

}  // namespace damctl

#endif
