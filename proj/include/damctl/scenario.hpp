// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_SCENARIO_HPP
#define DAMCTL_SCENARIO_HPP

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "damctl/expression.hpp"
#include "damctl/optimizer.hpp"
#include "damctl/state.hpp"

namespace damctl {

/// Configuration errors carry the JSON pointer of the offending entry and,
/// for assumption violations, the assumption tag, e.g. "(O1)".
class ScenarioError : public std::runtime_error {
public:
  ScenarioError(const std::string& message, std::string pointer = "", std::string tag = "")
      : std::runtime_error(message + (pointer.empty() ? "" : " at " + pointer) +
                           (tag.empty() ? "" : " " + tag)),
        pointer(std::move(pointer)),
        tag(std::move(tag)) {}
  std::string pointer;
  std::string tag;
};

/// A pair of component expressions for 2D data over (x1, x2, t).
struct VectorExpr {
  Expression x, y;
};

struct ScenarioConfig {
  nlohmann::json canonical;  ///< defaults filled in, used for hashing and round trips
  std::string source_dir;    ///< directory of the config file, for relative paths

  uint64_t seed = 0;
  int mesh_n = 8;
  Rect rect;
  MaterialLaw material;
  double T = 1.0;
  int M = 20;
  VectorExpr u0, v0, ell, b_init;
  Expression chi0;
  bool has_forcing = false;
  Expression chi_T_expr;               // empty when target comes from a forward run
  std::string chi_T_forward_control;   // control checkpoint path for "from_forward:"
  VectorExpr b_min_expr, b_max_expr;
  double radius = 10.0;
  OptimizeConfig optimizer;
  StepperConfig stepper;
  std::vector<double> gradcheck_lambdas{1e-2, 1e-3, 1e-4};
  int gradcheck_directions = 3;
  int lipschitz_pairs = 10;
  double lipschitz_amplitude = 0.5;

  /// material validation report computed at load time
  ValidationReport material_report;
};

ScenarioConfig scenario_from_json(const nlohmann::json& j, const std::string& source_dir = ".");
ScenarioConfig load_scenario(const std::string& path);
void write_scenario(const ScenarioConfig& config, const std::string& path);

/// FNV-1a hash of the canonical JSON dump.
uint64_t config_hash(const ScenarioConfig& config);

/// Materialized problem: mesh, state problem (with the initial control),
/// target field and optimizer settings. Resolving a "from_forward:" target
/// runs the forward solve with the referenced control.
struct BuiltScenario {
  std::shared_ptr<TriangleMesh2D> mesh;
  StateProblem problem;
  Vec chi_T;
  OptimizeConfig optimizer;
};

BuiltScenario build_scenario(const ScenarioConfig& config);

/// Applies a "dotted.path=value" override to a JSON document (values parse
/// as JSON first, falling back to a string).
void apply_override(nlohmann::json& j, const std::string& spec);

/// CLI entry: cmd in {solve, adjoint, linearize, gradcheck, optimize,
/// lipschitz}; outputs land in outdir (created if needed) together with a
/// summary.json. Returns the process exit code: 0 ok, 1 solver failure,
/// 2 usage error.
int run_command(const std::string& cmd, const ScenarioConfig& config, const std::string& outdir,
                const std::string& state_checkpoint = "");

}  // namespace damctl

#endif
