// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_LINALG_HPP
#define DAMCTL_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace damctl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Thrown when an iterative solve does not reach its tolerance.
class SolveError : public std::runtime_error {
public:
  SolveError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

struct SolveOptions {
  double rtol = 1e-10;  ///< target for ||A x - b|| / ||b||
  int max_iters = 0;    ///< 0 = choose from problem size
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Largest |A - A^T| entry, for symmetry checks.
double max_asymmetry(const SpMat& A);

/// true when max|A - A^T| <= tol * max|A|
bool is_symmetric(const SpMat& A, double tol = 1e-12);

/// Diagonally preconditioned conjugate gradient for SPD systems.
/// The returned solution satisfies ||A x - rhs|| <= rtol * ||rhs||
/// (verified on the true residual); rhs = 0 returns x = 0 exactly.
/// Deterministic for fixed inputs.
Vec solve_spd(const SpMat& A, const Vec& rhs, const SolveOptions& opts = {},
              SolveStats* stats = nullptr);

/// MINRES for symmetric (possibly indefinite) systems.
Vec solve_symmetric(const SpMat& A, const Vec& rhs, const SolveOptions& opts = {},
                    SolveStats* stats = nullptr);

/// BiCGSTAB for general square systems. Used for the rare damage tangent
/// operators that lose symmetry when f'' varies across vertices.
Vec solve_general(const SpMat& A, const Vec& rhs, const SolveOptions& opts = {},
                  SolveStats* stats = nullptr);

/// Dispatch on a measured symmetry/positivity hint: CG when the matrix is
/// symmetric, BiCGSTAB otherwise. MINRES backstops an unconverged CG.
Vec solve_auto(const SpMat& A, const Vec& rhs, const SolveOptions& opts = {},
               SolveStats* stats = nullptr);

}  // namespace damctl

#endif
