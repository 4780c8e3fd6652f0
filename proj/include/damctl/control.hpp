// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_CONTROL_HPP
#define DAMCTL_CONTROL_HPP

#include <limits>
#include <vector>

#include "damctl/assembly.hpp"
#include "damctl/geometry.hpp"
#include "damctl/linalg.hpp"

namespace damctl {

/// Boundary traction field over the time grid: values[k] holds the
/// interleaved (x,y) components at the boundary vertices at time node k.
/// Box bounds are per boundary dof; the radius of the control-space ball is
/// monitored, not enforced.
struct Control {
  std::vector<Vec> values;  // M+1 entries of length 2 nb
  Vec b_min, b_max;         // length 2 nb
  double radius = std::numeric_limits<double>::infinity();

  int num_time_nodes() const { return static_cast<int>(values.size()); }
  int num_boundary_dofs() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }

  static Control zero(const TriangleMesh2D& mesh, int num_steps);

  /// componentwise clamp onto [b_min, b_max]; idempotent
  void project();
  Control projected() const;
  bool feasible(double tol = 0.0) const;

  Control& operator+=(const Control& other);
  Control& operator-=(const Control& other);
  Control& operator*=(double s);
};

Control operator+(Control a, const Control& b);
Control operator-(Control a, const Control& b);
Control operator*(double s, Control a);

/// Discrete L2(Sigma) inner product: trapezoid arc weights on the boundary,
/// trapezoid rule over the time grid of length T.
double inner_sigma(const TriangleMesh2D& mesh, double T, const Control& a, const Control& b);
double norm_sigma(const TriangleMesh2D& mesh, double T, const Control& a);

struct BNormParts {
  double l2_sigma_sq = 0.0;  ///< \int_Sigma |b|^2
  double h_half = 0.0;       ///< L2-in-time of the H^{1/2}(Gamma) norm
  double h1_time = 0.0;      ///< H^1-in-time of the L2(Gamma) norm
  double total = 0.0;        ///< h_half + h1_time, the control-space norm
};

/// Control-space norm: the fractional part uses the Sobolev-Slobodeckij
/// double sum over boundary vertex pairs |g(x)-g(y)|^2 / |x-y|^2 with arc
/// weights, the time part uses difference quotients. Needs at least two
/// time nodes.
BNormParts norm_B(const Control& b, const TriangleMesh2D& mesh, double T);

}  // namespace damctl

#endif
