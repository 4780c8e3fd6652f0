// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#include "damctl/checkpoint.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace damctl {

namespace {

using nlohmann::json;

constexpr const char* kMagic = "DAMCKPT1 ";

struct FieldSpec {
  std::string name;
  Eigen::Index length;
};

void write_blocks(const std::string& path, const json& header,
                  const std::vector<std::vector<const Vec*>>& steps, double tau) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << kMagic << header.dump() << "\n";
    for (size_t k = 0; k < steps.size(); ++k) {
      const int64_t idx = static_cast<int64_t>(k);
      out.write(reinterpret_cast<const char*>(&idx), sizeof(idx));
      out.write(reinterpret_cast<const char*>(&tau), sizeof(tau));
      for (const Vec* field : steps[k])
        out.write(reinterpret_cast<const char*>(field->data()),
                  static_cast<std::streamsize>(sizeof(double)) * field->size());
    }
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

json read_header(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kMagic, 0) != 0)
    throw IoError("'" + path + "' is not a checkpoint file");
  return json::parse(line.substr(std::string(kMagic).size()));
}

void read_block(std::ifstream& in, const std::string& path, int64_t expect_idx, double& tau,
                const std::vector<FieldSpec>& fields, std::vector<Vec>& out) {
  int64_t idx = -1;
  in.read(reinterpret_cast<char*>(&idx), sizeof(idx));
  in.read(reinterpret_cast<char*>(&tau), sizeof(tau));
  if (!in || idx != expect_idx) throw IoError("corrupt step block in '" + path + "'");
  out.clear();
  for (const auto& f : fields) {
    Vec v(f.length);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double)) * f.length);
    if (!in) throw IoError("truncated step block in '" + path + "'");
    out.push_back(std::move(v));
  }
}

}  // namespace

void write_state_checkpoint(const std::string& path, const StateTrajectory& traj) {
  const int M = traj.num_steps();
  json header = {{"version", 1},
                 {"role", "state"},
                 {"num_steps", M},
                 {"tau", traj.tau},
                 {"fields", {"u", "v", "chi"}},
                 {"lengths", {traj.u[0].size(), traj.v[0].size(), traj.chi[0].size()}}};
  std::vector<std::vector<const Vec*>> steps;
  for (int k = 0; k <= M; ++k)
    steps.push_back({&traj.u[static_cast<size_t>(k)], &traj.v[static_cast<size_t>(k)],
                     &traj.chi[static_cast<size_t>(k)]});
  write_blocks(path, header, steps, traj.tau);
}

StateTrajectory read_state_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  const json header = read_header(in, path);
  if (header.at("role") != "state") throw IoError("'" + path + "' is not a state checkpoint");
  const int M = header.at("num_steps").get<int>();
  const auto lengths = header.at("lengths");
  std::vector<FieldSpec> fields = {{"u", lengths[0].get<Eigen::Index>()},
                                   {"v", lengths[1].get<Eigen::Index>()},
                                   {"chi", lengths[2].get<Eigen::Index>()}};
  StateTrajectory traj;
  traj.tau = header.at("tau").get<double>();
  for (int k = 0; k <= M; ++k) {
    std::vector<Vec> block;
    double tau = 0.0;
    read_block(in, path, k, tau, fields, block);
    traj.u.push_back(std::move(block[0]));
    traj.v.push_back(std::move(block[1]));
    traj.chi.push_back(std::move(block[2]));
  }
  finalize_trajectory(traj);
  return traj;
}

void write_adjoint_checkpoint(const std::string& path, const AdjointTrajectory& adj, double tau) {
  const int M = static_cast<int>(adj.p.size()) - 1;
  json header = {{"version", 1},
                 {"role", "adjoint"},
                 {"num_steps", M},
                 {"tau", tau},
                 {"fields", {"adjoint-p", "adjoint-q"}},
                 {"lengths", {adj.p[0].size(), adj.q[0].size()}}};
  std::vector<std::vector<const Vec*>> steps;
  for (int k = 0; k <= M; ++k)
    steps.push_back({&adj.p[static_cast<size_t>(k)], &adj.q[static_cast<size_t>(k)]});
  write_blocks(path, header, steps, tau);
}

AdjointTrajectory read_adjoint_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  const json header = read_header(in, path);
  if (header.at("role") != "adjoint") throw IoError("'" + path + "' is not an adjoint checkpoint");
  const int M = header.at("num_steps").get<int>();
  const auto lengths = header.at("lengths");
  std::vector<FieldSpec> fields = {{"adjoint-p", lengths[0].get<Eigen::Index>()},
                                   {"adjoint-q", lengths[1].get<Eigen::Index>()}};
  AdjointTrajectory adj;
  for (int k = 0; k <= M; ++k) {
    std::vector<Vec> block;
    double tau = 0.0;
    read_block(in, path, k, tau, fields, block);
    adj.p.push_back(std::move(block[0]));
    adj.q.push_back(std::move(block[1]));
  }
  return adj;
}

void write_control_checkpoint(const std::string& path, const Control& control, double tau) {
  const int M = control.num_time_nodes() - 1;
  json header = {{"version", 1},
                 {"role", "boundary-traction"},
                 {"num_steps", M},
                 {"tau", tau},
                 {"fields", {"b"}},
                 {"lengths", {control.values[0].size()}}};
  if (std::isfinite(control.radius)) header["radius"] = control.radius;
  std::vector<std::vector<const Vec*>> steps;
  for (int k = 0; k <= M; ++k) steps.push_back({&control.values[static_cast<size_t>(k)]});
  write_blocks(path, header, steps, tau);
}

Control read_control_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  const json header = read_header(in, path);
  if (header.at("role") != "boundary-traction")
    throw IoError("'" + path + "' is not a control checkpoint");
  const int M = header.at("num_steps").get<int>();
  std::vector<FieldSpec> fields = {{"b", header.at("lengths")[0].get<Eigen::Index>()}};
  Control control;
  control.radius = std::numeric_limits<double>::infinity();
  if (header.contains("radius") && header["radius"].is_number())
    control.radius = header["radius"].get<double>();
  for (int k = 0; k <= M; ++k) {
    std::vector<Vec> block;
    double tau = 0.0;
    read_block(in, path, k, tau, fields, block);
    control.values.push_back(std::move(block[0]));
  }
  const Eigen::Index n = control.values[0].size();
  control.b_min = Vec::Constant(n, -std::numeric_limits<double>::infinity());
  control.b_max = Vec::Constant(n, std::numeric_limits<double>::infinity());
  return control;
}

}  // namespace damctl
