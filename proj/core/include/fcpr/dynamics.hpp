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

#pragma once

#include <vector>

#include "fcpr/solver.hpp"

namespace fcpr {

enum class Schedule { kSequential, kSimultaneous };

struct DynamicsConfig {
  Schedule schedule = Schedule::kSequential;
  double conv_tol = 1e-8;  // max-norm round-to-round change at convergence
  int max_rounds = 10000;
  double damping = 1.0;    // step size in (0,1]; 1 is the undamped update
  SolverConfig solver;

  void validate() const;
};

enum class RunStatus { kConverged, kMaxRoundsReached, kCycleDetected };

const char* to_string(RunStatus status);
const char* to_string(Schedule schedule);

struct Trajectory {
  std::vector<StrategyProfile> profiles;  // includes the start profile
  RunStatus status = RunStatus::kMaxRoundsReached;
  int rounds = 0;          // number of update rounds performed
  double final_gap = 0.0;  // max-norm change over the last round
};

/// One round of best-response updates. Sequential updates sweep players in
/// index order, each seeing the freshest rows; simultaneous updates respond
/// to the round-start profile. With damping lambda the new row is the convex
/// mix (1 - lambda) * old + lambda * best_response, which stays feasible.
StrategyProfile step(const GameSpec& game, const StrategyProfile& profile,
                     const DynamicsConfig& cfg = {});

/// Iterates `step` from `start` until the profile moves at most conv_tol,
/// a two-round cycle is detected (current profile within conv_tol of the one
/// two rounds back but not of the previous one), or max_rounds is exhausted.
Trajectory run(const GameSpec& game, const StrategyProfile& start,
               const DynamicsConfig& cfg = {});

}  // namespace fcpr
