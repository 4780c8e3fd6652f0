// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/linalg.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/IterativeSolvers>

namespace damctl {

double max_asymmetry(const SpMat& A) {
  SpMat D = SpMat(A.transpose()) - A;
  double m = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SpMat::InnerIterator it(D, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

bool is_symmetric(const SpMat& A, double tol) {
  double scale = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  return max_asymmetry(A) <= tol * std::max(scale, 1e-300);
}

namespace {

int default_iters(const SpMat& A, const SolveOptions& opts) {
  if (opts.max_iters > 0) return opts.max_iters;
  return std::max(200, 40 * static_cast<int>(A.rows()));
}

template <typename Solver>
Vec run_iterative(Solver& solver, const char* name, const SpMat& A, const Vec& rhs,
                  const SolveOptions& opts, SolveStats* stats) {
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return Vec::Zero(A.rows());
  }
  solver.setTolerance(opts.rtol);
  solver.setMaxIterations(default_iters(A, opts));
  solver.compute(A);
  Vec x = solver.solve(rhs);
  // The recursively updated residual can drift from the true one, so the
  // contract is enforced on ||A x - rhs|| directly.
  double rel = (A * x - rhs).norm() / rhs_norm;
  if (!(rel <= opts.rtol)) {
    solver.setTolerance(std::max(opts.rtol * 1e-2, 1e-16));
    x = solver.solveWithGuess(rhs, x);
    rel = (A * x - rhs).norm() / rhs_norm;
  }
  if (!std::isfinite(rel) || rel > opts.rtol) {
    throw SolveError(std::string(name) + ": no convergence, relative residual " +
                         std::to_string(rel),
                     rel, static_cast<int>(solver.iterations()));
  }
  if (stats) *stats = {static_cast<int>(solver.iterations()), rel};
  return x;
}

}  // namespace

Vec solve_spd(const SpMat& A, const Vec& rhs, const SolveOptions& opts, SolveStats* stats) {
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  return run_iterative(cg, "solve_spd", A, rhs, opts, stats);
}

Vec solve_symmetric(const SpMat& A, const Vec& rhs, const SolveOptions& opts,
                    SolveStats* stats) {
  // Identity preconditioner: MINRES needs an SPD preconditioner and the
  // diagonal of an indefinite operator may change sign.
  Eigen::MINRES<SpMat, Eigen::Lower | Eigen::Upper, Eigen::IdentityPreconditioner> minres;
  return run_iterative(minres, "solve_symmetric", A, rhs, opts, stats);
}

Vec solve_general(const SpMat& A, const Vec& rhs, const SolveOptions& opts,
                  SolveStats* stats) {
  Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> bicg;
  return run_iterative(bicg, "solve_general", A, rhs, opts, stats);
}

Vec solve_auto(const SpMat& A, const Vec& rhs, const SolveOptions& opts, SolveStats* stats) {
  if (!is_symmetric(A)) return solve_general(A, rhs, opts, stats);
  try {
    return solve_spd(A, rhs, opts, stats);
  } catch (const SolveError&) {
    return solve_symmetric(A, rhs, opts, stats);
  }
}

}  // namespace damctl
