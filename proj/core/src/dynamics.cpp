// Copyright 2026 The fragile-cpr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fcpr/dynamics.hpp"

#include <cmath>

namespace fcpr {

void DynamicsConfig::validate() const {
  solver.validate();
  if (!(conv_tol > 0.0) || !std::isfinite(conv_tol)) throw ValidationError("dynamics.conv_tol: must be > 0");
  if (max_rounds < 1) throw ValidationError("dynamics.max_rounds: must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw ValidationError("dynamics.damping: must be in (0,1]");
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kConverged:
      return "converged";
    case RunStatus::kMaxRoundsReached:
      return "max_rounds_reached";
    case RunStatus::kCycleDetected:
      return "cycle_detected";
  }
  return "unknown";
}

const char* to_string(Schedule schedule) {
  return schedule == Schedule::kSequential ? "sequential" : "simultaneous";
}

StrategyProfile step(const GameSpec& game, const StrategyProfile& profile,
                     const DynamicsConfig& cfg) {
  cfg.validate();
  const int n = game.num_players();
  const int m = game.num_cprs();
  const double lambda = cfg.damping;

  StrategyProfile next = profile;
  if (cfg.schedule == Schedule::kSequential) {
    for (int i = 0; i < n; ++i) {
      const BestResponse br = best_response(game, i, next, cfg.solver);
      for (int j = 0; j < m; ++j)
        next(i, j) = (1.0 - lambda) * next(i, j) + lambda * br.values[static_cast<size_t>(j)];
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const BestResponse br = best_response(game, i, profile, cfg.solver);
      for (int j = 0; j < m; ++j)
        next(i, j) = (1.0 - lambda) * profile(i, j) + lambda * br.values[static_cast<size_t>(j)];
    }
  }
  return next;
}

Trajectory run(const GameSpec& game, const StrategyProfile& start, const DynamicsConfig& cfg) {
  cfg.validate();
  start.validate();
  if (start.num_players() != game.num_players() || start.num_cprs() != game.num_cprs())
    throw ValidationError("start: shape does not match the game");

  Trajectory traj;
  traj.profiles.push_back(start);
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    StrategyProfile next = step(game, traj.profiles.back(), cfg);
    const double gap = next.max_norm_distance(traj.profiles.back());
    traj.profiles.push_back(std::move(next));
    traj.rounds = round;
    traj.final_gap = gap;
    if (gap <= cfg.conv_tol) {
      traj.status = RunStatus::kConverged;
      return traj;
    }
    const size_t count = traj.profiles.size();
    if (count >= 3 &&
        traj.profiles[count - 1].max_norm_distance(traj.profiles[count - 3]) <= cfg.conv_tol) {
      traj.status = RunStatus::kCycleDetected;
      return traj;
    }
  }
  traj.status = RunStatus::kMaxRoundsReached;
  return traj;
}

}  // namespace fcpr
