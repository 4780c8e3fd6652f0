// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/material.hpp"

#include <cmath>

namespace damctl {

MaterialLaw::CEval MaterialLaw::eval_c(double x) const {
  double s, ds, dds;
  if (x <= 0.0) {
    s = 0.0;
    ds = 0.0;
    dds = 0.0;
  } else if (x >= 1.0) {
    s = 1.0;
    ds = 0.0;
    dds = 0.0;
  } else {
    const double x2 = x * x;
    const double x3 = x2 * x;
    const double x4 = x3 * x;
    s = ((-20.0 * x + 70.0) * x - 84.0) * x3 * x2 + 35.0 * x4;
    // s' = 140 x^3 (1-x)^3, s'' = 420 x^2 (1-x)^2 (1-2x)
    const double omx = 1.0 - x;
    ds = 140.0 * x3 * omx * omx * omx;
    dds = 420.0 * x2 * omx * omx * (1.0 - 2.0 * x);
  }
  const double a = 1.0 - delta;
  return {delta + a * s, a * ds, a * dds};
}

MaterialLaw::XiEval MaterialLaw::eval_xi(double x) const {
  const double eps = eps_xi;
  const double g = gamma_xi;
  if (x <= 0.0) return {0.0, 0.0, 0.0};
  if (x >= eps) return {g * (x - 0.5 * eps), g, 0.0};
  const double e2 = eps * eps;
  const double e3 = e2 * eps;
  const double x2 = x * x;
  const double x3 = x2 * x;
  return {g * (x3 / e2 - 0.5 * x3 * x / e3),
          g * (3.0 * x2 / e2 - 2.0 * x3 / e3),
          g * (6.0 * x / e2 - 6.0 * x2 / e3)};
}

MaterialLaw::FEval MaterialLaw::eval_f(double x) const {
  double df = 0.0;
  double xp = 1.0;  // x^(i-1)
  for (int i = 1; i <= 4; ++i) {
    df += i * f_coeffs[static_cast<size_t>(i)] * xp;
    xp *= x;
  }
  const double ddf = 2.0 * f_coeffs[2] + 6.0 * f_coeffs[3] * x + 12.0 * f_coeffs[4] * x * x;
  return {df, ddf};
}

namespace {
template <typename F>
Vec map_vec(const Vec& v, F&& f) {
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = f(v[i]);
  return out;
}
}  // namespace

Vec MaterialLaw::c_of(const Vec& chi) const {
  return map_vec(chi, [this](double x) { return eval_c(x).c; });
}
Vec MaterialLaw::dc_of(const Vec& chi) const {
  return map_vec(chi, [this](double x) { return eval_c(x).dc; });
}
Vec MaterialLaw::ddc_of(const Vec& chi) const {
  return map_vec(chi, [this](double x) { return eval_c(x).ddc; });
}
Vec MaterialLaw::xi_of(const Vec& rate) const {
  return map_vec(rate, [this](double x) { return eval_xi(x).xi; });
}
Vec MaterialLaw::dxi_of(const Vec& rate) const {
  return map_vec(rate, [this](double x) { return eval_xi(x).dxi; });
}
Vec MaterialLaw::ddxi_of(const Vec& rate) const {
  return map_vec(rate, [this](double x) { return eval_xi(x).ddxi; });
}
Vec MaterialLaw::df_of(const Vec& chi) const {
  return map_vec(chi, [this](double x) { return eval_f(x).df; });
}
Vec MaterialLaw::ddf_of(const Vec& chi) const {
  return map_vec(chi, [this](double x) { return eval_f(x).ddf; });
}

bool ValidationReport::has_tag(const std::string& tag) const {
  for (const auto& issue : issues)
    if (issue.tag == tag) return true;
  return false;
}

ValidationReport validate(const MaterialLaw& law) {
  ValidationReport report;
  auto fail = [&](const std::string& tag, const std::string& msg) {
    report.issues.push_back({tag, msg});
  };

  if (!(law.delta > 0.0))
    fail("(A2)", "delta must be > 0: the artifact requires the uniform ellipticity "
                 "floor c >= delta");
  if (law.delta >= 1.0) fail("(A2)", "delta must be < 1");
  if (!(law.lame.mu > 0.0)) fail("(A2)", "mu_L must be > 0 for positive definiteness");
  if (law.lame.lambda < 0.0) fail("(A2)", "lambda_L must be >= 0");
  if (!(law.mu_visc > 0.0)) fail("(A4)", "viscosity factor mu must be > 0");
  if (!(law.gamma_xi > 0.0))
    fail("(A3)", "gamma_xi must be > 0 so that xi is monotonically increasing");
  if (!(law.eps_xi > 0.0)) fail("(A3)", "eps_xi must be > 0");

  if (report.ok()) {
    // grid checks on the operating range
    const int n = 2001;
    double prev_c = -1.0;
    for (int i = 0; i < n; ++i) {
      double x = -1.0 + 3.0 * i / (n - 1);
      auto c = law.eval_c(x);
      if (c.c < law.delta - 1e-14 || c.c > 1.0 + 1e-14)
        fail("(A2)", "c out of [delta, 1] at x=" + std::to_string(x));
      if (c.c < prev_c - 1e-14) fail("(A2)", "c not monotone at x=" + std::to_string(x));
      if (std::abs(c.dc) > law.c_prime_bound() + 1e-12)
        fail("(A2)", "|c'| exceeds its closed-form bound at x=" + std::to_string(x));
      prev_c = c.c;

      double r = -2.0 * law.eps_xi + (4.0 * law.eps_xi) * i / (n - 1);
      auto xi = law.eval_xi(r);
      if (xi.dxi < 0.0 || xi.dxi > law.gamma_xi + 1e-12)
        fail("(A3)", "xi' out of [0, gamma_xi] at x=" + std::to_string(r));
      if (r <= 0.0 && xi.xi != 0.0) fail("(A3)", "xi(x) != 0 for x <= 0");
      if (std::abs(xi.ddxi) > law.xi_second_bound() + 1e-12)
        fail("(B2)", "|xi''| exceeds 3 gamma_xi / (2 eps_xi)");
    }
    // Lipschitz f' on the operating range [-1, 2]
    double lip = 0.0;
    for (double x : {-1.0, 0.0, 0.5, 1.0, 2.0})
      lip = std::max(lip, std::abs(law.eval_f(x).ddf));
    if (!std::isfinite(lip)) fail("(A5)", "f' is not Lipschitz on the operating range");
  }

  report.notes.push_back(
      "(A2) convex/concave split: c = c1 + c2 holds by construction, the septic "
      "smoothstep is convex on [0,1/2] and concave on [1/2,1], glued C3");
  report.notes.push_back("(A4) D = mu * C with state-independent mu");
  return report;
}

}  // namespace damctl
