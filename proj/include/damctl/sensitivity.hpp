// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_SENSITIVITY_HPP
#define DAMCTL_SENSITIVITY_HPP

#include <vector>

#include "damctl/control.hpp"
#include "damctl/state.hpp"

namespace damctl {

/// Tangent trajectory of the control-to-state map in a control direction,
/// with zero initial data.
struct LinearizedTrajectory {
  std::vector<Vec> udot;    // 0..M, interleaved 2m
  std::vector<Vec> chidot;  // 0..M
};

/// Rate-penalty coefficient slices in reversed-time orientation: index k
/// pairs with original time T - k tau. a[k] = xi'(chi_t), b_coef[k] =
/// xi''(chi_t) * chi_tt, both sampled at the matching original time node
/// (one-sided stencils at the ends). a is nonnegative everywhere.
struct CoefficientTrajectory {
  std::vector<Vec> a;
  std::vector<Vec> b_coef;
};

/// Adjoint pair stored in original time orientation: index k pairs with
/// t = k tau. p[M] = 0 exactly; the reversed-time scheme also carries the
/// ghost value beyond T (identically zero), which realizes the vanishing
/// final-time velocity of p in its own stencil.
struct AdjointTrajectory {
  std::vector<Vec> p;  // 0..M, interleaved 2m
  std::vector<Vec> q;  // 0..M
};

/// Exact tangent of the discrete forward map: the same stencils and lagging
/// pattern as solve_state, linearized about the stored trajectory. The
/// damage sub-step carries the converged Newton tangent (rate coefficient
/// xi'((chi^k - chi^{k-1})/tau) through the lumped mass).
LinearizedTrajectory solve_linearized(const StateProblem& problem, const StateTrajectory& traj,
                                      const Control& h);

CoefficientTrajectory compute_coefficients(const StateTrajectory& traj, const MaterialLaw& law);

/// Reversed-time decoupled scheme for the adjoint pair: q0 from the
/// final-time elliptic problem, then per step a linear SPD solve for p
/// (with q lagged) followed by a symmetric, possibly indefinite solve for q
/// (minimum-residual method). Results are returned in original orientation.
AdjointTrajectory solve_adjoint(const StateProblem& problem, const StateTrajectory& traj,
                                const Vec& chi_T, double lambda_T);

/// \int_Sigma (p + lambda_Sigma b) . h  - the adjoint representation of the
/// reduced-cost directional derivative.
double pair_gradient(const StateProblem& problem, const AdjointTrajectory& adj, const Control& h,
                     const Control& b, double lambda_Sigma);

/// lambda_T (chi(T) - chi_T, chidot(T))_M + lambda_Sigma (b, h)_Sigma - the
/// same derivative through the linearized trajectory.
double linearized_pairing(const StateProblem& problem, const StateTrajectory& traj,
                          const LinearizedTrajectory& lin, const Control& h, const Vec& chi_T,
                          double lambda_T, double lambda_Sigma);

/// Norm of the linearized pair used by the difference-quotient consistency
/// tests (same construction as state_difference_norm).
double linearized_norm(const StateProblem& problem, const LinearizedTrajectory& lin);

/// || (S(b + lambda h) - S(b)) / lambda - (udot, chidot) || for one lambda.
double difference_quotient_mismatch(const StateProblem& problem, const StateTrajectory& traj,
                                    const LinearizedTrajectory& lin, const Control& h,
                                    double lambda);

}  // namespace damctl

#endif
