// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "damctl/assembly.hpp"
#include "damctl/checkpoint.hpp"
#include "damctl/vtk_io.hpp"

namespace damctl {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const char* kVersion = "1.0.0";

json default_config() {
  return json{
      {"seed", 0},
      {"mesh", {{"n", 8}, {"rect", {0.0, 0.0, 1.0, 1.0}}}},
      {"material",
       {{"delta", 1e-2},
        {"lame", {1.0, 1.0}},
        {"mu_visc", 0.1},
        {"gamma_xi", 100.0},
        {"eps_xi", 0.05},
        {"f_coeffs", {1.0, -1.0}}}},
      {"time", {{"T", 1.0}, {"M", 20}}},
      {"initial", {{"u0", {"0", "0"}}, {"v0", {"0", "0"}}, {"chi0", "1"}}},
      {"forcing", {{"ell", {"0", "0"}}}},
      {"target", {{"chi_T", "1"}}},
      {"control",
       {{"b_min", {-1.0, -1.0}},
        {"b_max", {1.0, 1.0}},
        {"R", 10.0},
        {"initial", {"0", "0"}}}},
      {"cost", {{"lambda_T", 1.0}, {"lambda_Sigma", 1e-4}}},
      {"optimizer",
       {{"max_iters", 100},
        {"armijo_c1", 1e-4},
        {"backtrack", 0.5},
        {"max_backtracks", 30},
        {"initial_step", 1.0},
        {"vi_tolerance", 1e-8}}},
      {"solver",
       {{"linear_rtol", 1e-12},
        {"newton_rtol", 1e-12},
        {"newton_atol", 1e-13},
        {"newton_max_iters", 50},
        {"smooth_rates", false}}},
      {"gradcheck",
       {{"lambdas", {1e-2, 1e-3, 1e-4}}, {"direction", {"", ""}}, {"num_directions", 3}}},
      {"lipschitz", {{"num_pairs", 10}, {"amplitude", 0.5}}}};
}

void merge_defaults(json& target, const json& defaults, const std::string& pointer) {
  for (auto it = defaults.begin(); it != defaults.end(); ++it) {
    if (!target.contains(it.key())) {
      target[it.key()] = it.value();
    } else if (it.value().is_object()) {
      if (!target[it.key()].is_object())
        throw ScenarioError("expected an object", pointer + "/" + it.key());
      merge_defaults(target[it.key()], it.value(), pointer + "/" + it.key());
    }
  }
}

double get_number(const json& j, const std::string& pointer) {
  const json& v = j.at(json::json_pointer(pointer));
  if (!v.is_number()) throw ScenarioError("expected a number", pointer);
  return v.get<double>();
}

Expression parse_expr(const json& v, const std::string& pointer) {
  try {
    if (v.is_number()) return Expression::parse(v.dump());
    if (v.is_string()) return Expression::parse(v.get<std::string>());
  } catch (const ExpressionError& err) {
    throw ScenarioError(std::string("bad expression: ") + err.what(), pointer);
  }
  throw ScenarioError("expected an expression string or number", pointer);
}

VectorExpr parse_vector_expr(const json& v, const std::string& pointer) {
  if (!v.is_array() || v.size() != 2)
    throw ScenarioError("expected a two-component array", pointer);
  return {parse_expr(v[0], pointer + "/0"), parse_expr(v[1], pointer + "/1")};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Vec eval_vector_field(const TriangleMesh2D& mesh, const VectorExpr& e, double t) {
  Vec out(2 * mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Point2& p = mesh.vertices[static_cast<size_t>(v)];
    out[2 * v] = e.x(p.x, p.y, t);
    out[2 * v + 1] = e.y(p.x, p.y, t);
  }
  return out;
}

Vec eval_boundary_field(const TriangleMesh2D& mesh, const VectorExpr& e, double t) {
  Vec out(2 * mesh.num_boundary_vertices());
  for (int i = 0; i < mesh.num_boundary_vertices(); ++i) {
    const Point2& p = mesh.vertices[static_cast<size_t>(mesh.boundary_vertex_ids[static_cast<size_t>(i)])];
    out[2 * i] = e.x(p.x, p.y, t);
    out[2 * i + 1] = e.y(p.x, p.y, t);
  }
  return out;
}

Vec eval_scalar_field(const TriangleMesh2D& mesh, const Expression& e, double t = 0.0) {
  Vec out(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Point2& p = mesh.vertices[static_cast<size_t>(v)];
    out[v] = e(p.x, p.y, t);
  }
  return out;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& input, const std::string& source_dir) {
  if (!input.is_object()) throw ScenarioError("config root must be an object", "/");
  ScenarioConfig cfg;
  cfg.canonical = input;
  merge_defaults(cfg.canonical, default_config(), "");
  cfg.source_dir = source_dir;
  const json& j = cfg.canonical;

  cfg.seed = j.at("seed").get<uint64_t>();

  cfg.mesh_n = j.at("mesh").at("n").get<int>();
  if (cfg.mesh_n < 1) throw ScenarioError("mesh subdivision must be >= 1", "/mesh/n");
  const auto& rect = j.at("mesh").at("rect");
  if (!rect.is_array() || rect.size() != 4)
    throw ScenarioError("rect must be [x0, y0, x1, y1]", "/mesh/rect");
  cfg.rect = {rect[0].get<double>(), rect[1].get<double>(), rect[2].get<double>(),
              rect[3].get<double>()};
  if (!(cfg.rect.width() > 0.0) || !(cfg.rect.height() > 0.0))
    throw ScenarioError("rectangle must have positive extents", "/mesh/rect");

  const json& mat = j.at("material");
  cfg.material.delta = get_number(j, "/material/delta");
  cfg.material.lame = {mat.at("lame").at(0).get<double>(), mat.at("lame").at(1).get<double>()};
  cfg.material.mu_visc = get_number(j, "/material/mu_visc");
  cfg.material.gamma_xi = get_number(j, "/material/gamma_xi");
  cfg.material.eps_xi = get_number(j, "/material/eps_xi");
  const auto& fc = mat.at("f_coeffs");
  if (!fc.is_array() || fc.size() > 5)
    throw ScenarioError("f_coeffs must be <= 5 ascending coefficients", "/material/f_coeffs");
  cfg.material.f_coeffs = {0.0, 0.0, 0.0, 0.0, 0.0};
  for (size_t i = 0; i < fc.size(); ++i) cfg.material.f_coeffs[i] = fc[i].get<double>();
  cfg.material_report = validate(cfg.material);
  if (!cfg.material_report.ok()) {
    const auto& issue = cfg.material_report.issues.front();
    throw ScenarioError("material law: " + issue.message, "/material", issue.tag);
  }

  cfg.T = get_number(j, "/time/T");
  cfg.M = j.at("time").at("M").get<int>();
  if (!(cfg.T > 0.0)) throw ScenarioError("final time must be positive", "/time/T");
  if (cfg.M < 1) throw ScenarioError("need at least one time step", "/time/M");

  cfg.u0 = parse_vector_expr(j.at("initial").at("u0"), "/initial/u0");
  cfg.v0 = parse_vector_expr(j.at("initial").at("v0"), "/initial/v0");
  cfg.chi0 = parse_expr(j.at("initial").at("chi0"), "/initial/chi0");
  cfg.ell = parse_vector_expr(j.at("forcing").at("ell"), "/forcing/ell");
  cfg.has_forcing = true;

  const json& target = j.at("target").at("chi_T");
  if (target.is_string() && target.get<std::string>().rfind("from_forward:", 0) == 0) {
    cfg.chi_T_forward_control = target.get<std::string>().substr(std::string("from_forward:").size());
    if (cfg.chi_T_forward_control.empty())
      throw ScenarioError("from_forward needs a control checkpoint path", "/target/chi_T");
    const fs::path p = fs::path(cfg.source_dir) / cfg.chi_T_forward_control;
    if (!fs::exists(p))
      throw ScenarioError("referenced control checkpoint '" + p.string() + "' does not exist",
                          "/target/chi_T", "(O2)");
  } else {
    cfg.chi_T_expr = parse_expr(target, "/target/chi_T");
  }

  cfg.b_min_expr = parse_vector_expr(j.at("control").at("b_min"), "/control/b_min");
  cfg.b_max_expr = parse_vector_expr(j.at("control").at("b_max"), "/control/b_max");
  cfg.b_init = parse_vector_expr(j.at("control").at("initial"), "/control/initial");
  cfg.radius = get_number(j, "/control/R");
  if (!(cfg.radius > 0.0))
    throw ScenarioError("the control-space radius R must be positive", "/control/R", "(O3)");

  cfg.optimizer.lambda_T = get_number(j, "/cost/lambda_T");
  cfg.optimizer.lambda_Sigma = get_number(j, "/cost/lambda_Sigma");
  if (cfg.optimizer.lambda_T < 0.0)
    throw ScenarioError("lambda_T must be non-negative", "/cost/lambda_T", "(O1)");
  if (cfg.optimizer.lambda_Sigma < 0.0)
    throw ScenarioError("lambda_Sigma must be non-negative", "/cost/lambda_Sigma", "(O1)");

  const json& opt = j.at("optimizer");
  cfg.optimizer.max_iters = opt.at("max_iters").get<int>();
  cfg.optimizer.armijo_c1 = opt.at("armijo_c1").get<double>();
  cfg.optimizer.backtrack = opt.at("backtrack").get<double>();
  cfg.optimizer.max_backtracks = opt.at("max_backtracks").get<int>();
  cfg.optimizer.initial_step = opt.at("initial_step").get<double>();
  cfg.optimizer.vi_tolerance = opt.at("vi_tolerance").get<double>();
  try {
    cfg.optimizer.validate();
  } catch (const std::exception& err) {
    throw ScenarioError(err.what(), "/optimizer");
  }

  const json& sol = j.at("solver");
  cfg.stepper.linear_rtol = sol.at("linear_rtol").get<double>();
  cfg.stepper.newton_rtol = sol.at("newton_rtol").get<double>();
  cfg.stepper.newton_atol = sol.at("newton_atol").get<double>();
  cfg.stepper.newton_max_iters = sol.at("newton_max_iters").get<int>();
  cfg.stepper.smooth_rates = sol.at("smooth_rates").get<bool>();

  cfg.gradcheck_lambdas = j.at("gradcheck").at("lambdas").get<std::vector<double>>();
  cfg.gradcheck_directions = j.at("gradcheck").at("num_directions").get<int>();
  cfg.lipschitz_pairs = j.at("lipschitz").at("num_pairs").get<int>();
  cfg.lipschitz_amplitude = j.at("lipschitz").at("amplitude").get<double>();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& err) {
    throw ScenarioError(std::string("invalid JSON: ") + err.what());
  }
  return scenario_from_json(j, fs::path(path).parent_path().string());
}

void write_scenario(const ScenarioConfig& config, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ScenarioError("cannot open '" + tmp + "' for writing");
    out << config.canonical.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

uint64_t config_hash(const ScenarioConfig& config) {
  const std::string dump = config.canonical.dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void apply_override(json& j, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ScenarioError("override must look like key.path=value: '" + spec + "'");
  std::string pointer = "/" + spec.substr(0, eq);
  for (auto& c : pointer)
    if (c == '.') c = '/';
  const std::string value = spec.substr(eq + 1);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // plain string
  }
  j[json::json_pointer(pointer)] = parsed;
}

BuiltScenario build_scenario(const ScenarioConfig& cfg) {
  BuiltScenario built;
  built.mesh = std::make_shared<TriangleMesh2D>(build_structured_mesh(cfg.mesh_n, cfg.rect));
  const TriangleMesh2D& mesh = *built.mesh;

  StateProblem& problem = built.problem;
  problem.mesh = built.mesh;
  problem.law = cfg.material;
  problem.T = cfg.T;
  problem.M = cfg.M;
  problem.stepper = cfg.stepper;
  problem.u0 = eval_vector_field(mesh, cfg.u0, 0.0);
  problem.v0 = eval_vector_field(mesh, cfg.v0, 0.0);
  problem.chi0 = eval_scalar_field(mesh, cfg.chi0);

  const double tau = cfg.T / cfg.M;
  problem.ell.clear();
  for (int k = 0; k <= cfg.M; ++k)
    problem.ell.push_back(eval_vector_field(mesh, cfg.ell, k * tau));

  Control control = Control::zero(mesh, cfg.M);
  control.b_min = eval_boundary_field(mesh, cfg.b_min_expr, 0.0);
  control.b_max = eval_boundary_field(mesh, cfg.b_max_expr, 0.0);
  control.radius = cfg.radius;
  if (((control.b_max - control.b_min).array() < 0.0).any())
    throw ScenarioError("b_min exceeds b_max somewhere on the boundary", "/control", "(Badm)");
  for (int k = 0; k <= cfg.M; ++k)
    control.values[static_cast<size_t>(k)] = eval_boundary_field(mesh, cfg.b_init, k * tau);
  if (!control.feasible(0.0))
    throw ScenarioError("initial control violates the box constraints", "/control/initial",
                        "(Badm)");
  problem.control = control;

  if (!cfg.chi_T_forward_control.empty()) {
    const fs::path path = fs::path(cfg.source_dir) / cfg.chi_T_forward_control;
    Control target_control = read_control_checkpoint(path.string());
    if (target_control.num_time_nodes() != cfg.M + 1 ||
        target_control.num_boundary_dofs() != 2 * mesh.num_boundary_vertices())
      throw ScenarioError("control checkpoint '" + path.string() + "' does not match the grid",
                          "/target/chi_T");
    target_control.b_min = control.b_min;
    target_control.b_max = control.b_max;
    StateProblem forward = problem;
    forward.control = target_control;
    built.chi_T = solve_state(forward).chi.back();
  } else {
    built.chi_T = eval_scalar_field(mesh, cfg.chi_T_expr);
  }
  if (!built.chi_T.allFinite())
    throw ScenarioError("target profile is not a bounded field", "/target/chi_T", "(O2)");

  built.optimizer = cfg.optimizer;
  return built;
}

// ---------------------------------------------------------------------------
// command runner
// ---------------------------------------------------------------------------

namespace {

struct Csv {
  explicit Csv(const fs::path& path) : path_(path) {}
  std::string buffer;
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      buffer += cells[i];
      buffer += (i + 1 == cells.size()) ? '\n' : ',';
    }
  }
  void flush() {
    const std::string tmp = path_.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << buffer;
      if (!out) throw IoError("write failed for '" + tmp + "'");
    }
    fs::rename(tmp, path_.string());
  }
  fs::path path_;
};

Control random_feasible_control(const Control& like, double amplitude, std::mt19937_64& rng) {
  Control out = like;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (auto& slice : out.values)
    for (Eigen::Index i = 0; i < slice.size(); ++i) slice[i] = amplitude * unit(rng);
  out.project();
  return out;
}

Control random_direction(const TriangleMesh2D& mesh, int M, std::mt19937_64& rng) {
  Control h = Control::zero(mesh, M);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (auto& slice : h.values)
    for (Eigen::Index i = 0; i < slice.size(); ++i) slice[i] = unit(rng);
  return h;
}

void write_state_vtk(const fs::path& outdir, const TriangleMesh2D& mesh,
                     const StateTrajectory& traj) {
  for (int k = 0; k <= traj.num_steps(); ++k) {
    char name[64];
    std::snprintf(name, sizeof(name), "state_%04d.vtk", k);
    write_vtk_mesh((outdir / name).string(), mesh,
                   {{"u", 2, traj.u[static_cast<size_t>(k)]},
                    {"chi", 1, traj.chi[static_cast<size_t>(k)]}});
  }
}

json base_summary(const std::string& cmd, const ScenarioConfig& cfg) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return json{{"command", cmd},
              {"config_hash", hash},
              {"versions", {{"damctl", kVersion}}},
              {"metrics", json::object()}};
}

void write_summary(const fs::path& outdir, json summary, double wall_seconds) {
  summary["wall_time_s"] = wall_seconds;
  const std::string tmp = (outdir / "summary.json").string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << summary.dump(2) << "\n";
  }
  fs::rename(tmp, (outdir / "summary.json").string());
}

}  // namespace

int run_command(const std::string& cmd, const ScenarioConfig& cfg, const std::string& outdir_str,
                const std::string& state_checkpoint) {
  const bool known = cmd == "solve" || cmd == "adjoint" || cmd == "linearize" ||
                     cmd == "gradcheck" || cmd == "optimize" || cmd == "lipschitz";
  if (!known) {
    std::fprintf(stderr, "damctl: unknown command '%s'\n", cmd.c_str());
    return 2;
  }
  const fs::path outdir(outdir_str);
  fs::create_directories(outdir);
  const auto t0 = std::chrono::steady_clock::now();
  json summary = base_summary(cmd, cfg);
  auto& metrics = summary["metrics"];

  try {
    BuiltScenario built = build_scenario(cfg);
    const TriangleMesh2D& mesh = *built.mesh;
    const StateProblem& problem = built.problem;
    const double lT = built.optimizer.lambda_T;
    const double lS = built.optimizer.lambda_Sigma;

    if (cmd == "solve") {
      const StateTrajectory traj = solve_state(problem);
      write_state_checkpoint((outdir / "state.ckpt").string(), traj);
      write_control_checkpoint((outdir / "control.ckpt").string(), problem.control,
                               problem.tau());
      write_state_vtk(outdir, mesh, traj);
      const SpMat Mv = assemble_vector_mass(mesh);
      Csv csv(outdir / "energies.csv");
      csv.row({"step", "time", "kinetic", "elastic", "chi_mean", "max_chi_t", "cost_to_date"});
      const Vec ML = assemble_lumped_mass(mesh);
      const SpMat Ms = assemble_mass(mesh);
      const Vec arc = boundary_arc_weights(mesh);
      const double area = ML.sum();
      const double tau = problem.tau();
      double drift = 0.0;
      double penalty = 0.0;
      for (int k = 0; k <= problem.M; ++k) {
        const Vec& u = traj.u[static_cast<size_t>(k)];
        const Vec& v = traj.v[static_cast<size_t>(k)];
        const Vec& bk = problem.control.values[static_cast<size_t>(k)];
        const Vec cvals = problem.law.c_of(traj.chi[static_cast<size_t>(k)]);
        const SpMat E = assemble_elasticity(mesh, cvals, problem.law.lame);
        double slice = 0.0;
        for (Eigen::Index i = 0; i < arc.size(); ++i)
          slice += arc[i] * (bk[2 * i] * bk[2 * i] + bk[2 * i + 1] * bk[2 * i + 1]);
        penalty += ((k == 0 || k == problem.M) ? 0.5 * tau : tau) * slice;
        const Vec diff = traj.chi[static_cast<size_t>(k)] - built.chi_T;
        const double cost_to_date = 0.5 * lT * diff.dot(Ms * diff) + 0.5 * lS * penalty;
        drift = std::max(drift, (traj.chi[static_cast<size_t>(k)] - traj.chi[0])
                                    .lpNorm<Eigen::Infinity>());
        csv.row({std::to_string(k), format_double(k * tau),
                 format_double(0.5 * v.dot(Mv * v)), format_double(0.5 * u.dot(E * u)),
                 format_double(ML.dot(traj.chi[static_cast<size_t>(k)]) / area),
                 format_double(traj.chi_t[static_cast<size_t>(k)].lpNorm<Eigen::Infinity>()),
                 format_double(cost_to_date)});
      }
      csv.flush();
      metrics["final_cost"] = evaluate_cost(problem, traj, problem.control, built.chi_T, lT, lS);
      metrics["max_chi_drift"] = drift;
    } else if (cmd == "adjoint" || cmd == "linearize" || cmd == "gradcheck") {
      // the backward pass always reads the trajectory from disk
      StateTrajectory traj;
      if (!state_checkpoint.empty()) {
        traj = read_state_checkpoint(state_checkpoint);
      } else {
        const StateTrajectory fresh = solve_state(problem);
        write_state_checkpoint((outdir / "state.ckpt").string(), fresh);
        traj = read_state_checkpoint((outdir / "state.ckpt").string());
      }
      if (cmd == "adjoint") {
        const AdjointTrajectory adj = solve_adjoint(problem, traj, built.chi_T, lT);
        write_adjoint_checkpoint((outdir / "adjoint.ckpt").string(), adj, problem.tau());
        for (int k = 0; k <= problem.M; ++k) {
          char name[64];
          std::snprintf(name, sizeof(name), "adjoint_%04d.vtk", k);
          write_vtk_mesh((outdir / name).string(), mesh,
                         {{"p", 2, adj.p[static_cast<size_t>(k)]},
                          {"q", 1, adj.q[static_cast<size_t>(k)]}});
        }
        metrics["q_final_max"] = adj.q.back().lpNorm<Eigen::Infinity>();
      } else {
        std::mt19937_64 rng(cfg.seed);
        Control h = random_direction(mesh, problem.M, rng);
        const auto& dir_json = cfg.canonical.at("gradcheck").at("direction");
        const bool explicit_dir =
            !(dir_json.at(0).is_string() && dir_json.at(0).get<std::string>().empty());
        if (explicit_dir) {
          VectorExpr dir = parse_vector_expr(dir_json, "/gradcheck/direction");
          const double tau = problem.tau();
          for (int k = 0; k <= problem.M; ++k)
            h.values[static_cast<size_t>(k)] = eval_boundary_field(mesh, dir, k * tau);
        }
        const LinearizedTrajectory lin = solve_linearized(problem, traj, h);
        if (cmd == "linearize") {
          for (int k = 0; k <= problem.M; ++k) {
            char name[64];
            std::snprintf(name, sizeof(name), "linearized_%04d.vtk", k);
            write_vtk_mesh((outdir / name).string(), mesh,
                           {{"udot", 2, lin.udot[static_cast<size_t>(k)]},
                            {"chidot", 1, lin.chidot[static_cast<size_t>(k)]}});
          }
          metrics["linearized_norm"] = linearized_norm(problem, lin);
        } else {
          const AdjointTrajectory adj = solve_adjoint(problem, traj, built.chi_T, lT);
          const double adjoint_pairing = pair_gradient(problem, adj, h, problem.control, lS);
          const double lin_pairing =
              linearized_pairing(problem, traj, lin, h, built.chi_T, lT, lS);
          Csv csv(outdir / "gradcheck.csv");
          csv.row({"lambda", "fd_central", "adjoint_pairing", "linearized_pairing",
                   "rel_gap_adjoint", "rel_gap_linearized", "qdot_mismatch"});
          for (double lambda : cfg.gradcheck_lambdas) {
            const double jp = reduced_cost(problem, problem.control + lambda * h, built.chi_T,
                                           lT, lS);
            const double jm = reduced_cost(problem, problem.control + (-lambda) * h, built.chi_T,
                                           lT, lS);
            const double fd = (jp - jm) / (2.0 * lambda);
            const double mismatch = difference_quotient_mismatch(problem, traj, lin, h, lambda);
            csv.row({format_double(lambda), format_double(fd), format_double(adjoint_pairing),
                     format_double(lin_pairing),
                     format_double(std::abs(adjoint_pairing - fd) / std::max(std::abs(fd), 1e-300)),
                     format_double(std::abs(lin_pairing - fd) / std::max(std::abs(fd), 1e-300)),
                     format_double(mismatch)});
          }
          csv.flush();
          metrics["adjoint_pairing"] = adjoint_pairing;
          metrics["linearized_pairing"] = lin_pairing;
        }
      }
    } else if (cmd == "optimize") {
      const OptimizeResult result = optimize(problem, built.chi_T, built.optimizer);
      Csv csv(outdir / "history.csv");
      csv.row({"iter", "j", "vi_residual", "B_norm", "step"});
      for (const auto& rec : result.history)
        csv.row({std::to_string(rec.iter), format_double(rec.cost),
                 format_double(rec.vi_residual), format_double(rec.b_norm),
                 format_double(rec.step)});
      csv.flush();
      write_control_checkpoint((outdir / "control.ckpt").string(), result.control,
                               problem.tau());
      for (int k = 0; k <= problem.M; ++k) {
        char name[64];
        std::snprintf(name, sizeof(name), "control_%04d.vtk", k);
        write_vtk_boundary((outdir / name).string(), mesh,
                           {{"b", 2, result.control.values[static_cast<size_t>(k)]}});
      }
      metrics["final_cost"] = result.cost;
      metrics["final_vi_residual"] = result.vi_residual;
      metrics["iterations"] = result.history.back().iter;
      metrics["stalled"] = result.stalled;
      metrics["converged"] = result.converged;
    } else if (cmd == "lipschitz") {
      std::mt19937_64 rng(cfg.seed);
      Csv csv(outdir / "lipschitz.csv");
      csv.row({"pair", "control_distance", "state_distance", "ratio"});
      double max_ratio = 0.0;
      for (int i = 0; i < cfg.lipschitz_pairs; ++i) {
        const Control b1 = random_feasible_control(problem.control, cfg.lipschitz_amplitude, rng);
        const Control b2 = random_feasible_control(problem.control, cfg.lipschitz_amplitude, rng);
        const double db = norm_sigma(mesh, problem.T, b1 - b2);
        const double ratio = lipschitz_probe(problem, b1, b2);
        max_ratio = std::max(max_ratio, ratio);
        csv.row({std::to_string(i), format_double(db), format_double(ratio * db),
                 format_double(ratio)});
      }
      csv.flush();
      metrics["max_ratio"] = max_ratio;
    }
  } catch (const std::exception& err) {
    json failure = {{"error", err.what()}, {"command", cmd}};
    std::ofstream out(outdir / "error.json");
    out << failure.dump(2) << "\n";
    std::fprintf(stderr, "damctl %s: %s\n", cmd.c_str(), err.what());
    return 1;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_summary(outdir, summary, wall);
  return 0;
}

}  // namespace damctl
