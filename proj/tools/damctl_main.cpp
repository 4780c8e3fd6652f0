// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "damctl/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"damctl - boundary control of viscous damage evolution"};
  app.require_subcommand(1);

  std::string config_path;
  std::string outdir = "out";
  std::string state_path;
  std::vector<std::string> overrides;

  const std::vector<std::string> commands = {"solve",    "adjoint",  "linearize",
                                             "gradcheck", "optimize", "lipschitz"};
  const char* descriptions[] = {
      "run the forward state solve and write trajectory outputs",
      "solve the adjoint pair for the stored or freshly computed trajectory",
      "solve the linearized state in a control direction",
      "compare adjoint and linearized pairings against finite differences",
      "projected gradient descent on the boundary control",
      "sample control pairs and report state/control stability ratios"};
  std::vector<CLI::App*> subs;
  for (size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], descriptions[i]);
    sub->add_option("--config", config_path, "scenario JSON file")->required();
    sub->add_option("--out", outdir, "output directory");
    sub->add_option("--override", overrides, "key.path=value overrides")->take_all();
    if (commands[i] == "adjoint")
      sub->add_option("--state", state_path, "state checkpoint to re-read");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string cmd;
  for (size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) cmd = commands[i];

  try {
    damctl::ScenarioConfig cfg = damctl::load_scenario(config_path);
    if (!overrides.empty()) {
      nlohmann::json j = cfg.canonical;
      for (const auto& spec : overrides) damctl::apply_override(j, spec);
      cfg = damctl::scenario_from_json(j, cfg.source_dir);
    }
    return damctl::run_command(cmd, cfg, outdir, state_path);
  } catch (const damctl::ScenarioError& err) {
    std::fprintf(stderr, "damctl: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "damctl: %s\n", err.what());
    return 1;
  }
}
