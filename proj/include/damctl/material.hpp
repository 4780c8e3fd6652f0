// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_MATERIAL_HPP
#define DAMCTL_MATERIAL_HPP

#include <array>
#include <string>
#include <vector>

#include "damctl/linalg.hpp"

namespace damctl {

struct LameParams {
  double lambda = 1.0;
  double mu = 1.0;
};

/// Damage-dependent material data: stiffness factor c (C3 septic smoothstep
/// with residual floor delta), isotropic base tensor via Lame constants,
/// viscosity factor, the C2 irreversibility ramp xi, and a polynomial
/// potential f of degree <= 4 (ascending coefficients; the default is
/// f(x) = 1 - x, a constant driving force).
struct MaterialLaw {
  double delta = 1e-2;
  LameParams lame{1.0, 1.0};
  double mu_visc = 0.1;
  double gamma_xi = 100.0;
  double eps_xi = 0.05;
  std::array<double, 5> f_coeffs{1.0, -1.0, 0.0, 0.0, 0.0};

  struct CEval {
    double c, dc, ddc;
  };
  /// c(x) = delta + (1-delta) s7(x); s7 is the C3 septic smoothstep
  /// -20x^7 + 70x^6 - 84x^5 + 35x^4 on [0,1], clamped outside.
  CEval eval_c(double x) const;

  struct XiEval {
    double xi, dxi, ddxi;
  };
  /// xi(x) = gamma_xi * s(x) with s = 0 for x <= 0,
  /// s = x^3/eps^2 - x^4/(2 eps^3) on [0, eps], s = x - eps/2 beyond.
  XiEval eval_xi(double x) const;

  struct FEval {
    double df, ddf;
  };
  FEval eval_f(double x) const;

  /// Largest possible |c'|, attained at x = 1/2.
  double c_prime_bound() const { return (1.0 - delta) * 140.0 / 64.0; }
  /// Largest possible |xi''|, attained at x = eps_xi/2.
  double xi_second_bound() const { return 1.5 * gamma_xi / eps_xi; }

  // vertexwise evaluations
  Vec c_of(const Vec& chi) const;
  Vec dc_of(const Vec& chi) const;
  Vec ddc_of(const Vec& chi) const;
  Vec xi_of(const Vec& rate) const;
  Vec dxi_of(const Vec& rate) const;
  Vec ddxi_of(const Vec& rate) const;
  Vec df_of(const Vec& chi) const;
  Vec ddf_of(const Vec& chi) const;
};

struct ValidationIssue {
  std::string tag;      ///< violated assumption, e.g. "(A3)"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::vector<std::string> notes;
  bool ok() const { return issues.empty(); }
  bool has_tag(const std::string& tag) const;
};

/// Numerically checks the assumption contracts on a grid: floor and
/// monotonicity of c, the |c'| bound, monotonicity and bounds of xi and its
/// derivatives, positivity of the material constants, Lipschitz f' on the
/// operating range. The convex/concave split of c is recorded as a note
/// (satisfied by construction of the smoothstep), not proven.
ValidationReport validate(const MaterialLaw& law);

}  // namespace damctl

#endif
