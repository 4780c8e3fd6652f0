// Copyright 2026 the damctl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DAMCTL_CHECKPOINT_HPP
#define DAMCTL_CHECKPOINT_HPP

#include <string>
#include <vector>

#include "damctl/control.hpp"
#include "damctl/sensitivity.hpp"
#include "damctl/state.hpp"

namespace damctl {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Checkpoint files: one JSON header line ("DAMCKPT1 " prefix) describing the
// role, field names and sizes, then per-step binary blocks of
// (int64 step index, double tau, little-endian doubles per field). Writes go
// to a temporary file that is renamed into place.

void write_state_checkpoint(const std::string& path, const StateTrajectory& traj);
StateTrajectory read_state_checkpoint(const std::string& path);

void write_adjoint_checkpoint(const std::string& path, const AdjointTrajectory& adj, double tau);
AdjointTrajectory read_adjoint_checkpoint(const std::string& path);

void write_control_checkpoint(const std::string& path, const Control& control, double tau);
Control read_control_checkpoint(const std::string& path);

}  // namespace damctl

#endif
