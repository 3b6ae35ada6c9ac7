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

#include <ostream>
#include <string>
#include <vector>

#include "fcpr/dynamics.hpp"
#include "fcpr/equilibrium.hpp"

namespace fcpr {

/// Formats a real with 17 significant digits, enough to round-trip a double.
std::string format_real(double v);

/// Trajectory CSV: header `round,x_0_0,...,x_{n-1}_{m-1},gap`, then one row
/// per round with the profile in row-major order and the max-norm change from
/// the previous round (0 for the start row).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Equilibrium-set CSV: header `id,player,type,kappa0,x_0,...,total_0,...`,
/// one row per (point, player) with that player's row, type, multiplier, and
/// the point's per-resource totals.
void write_gne_set_csv(std::ostream& out, const GameSpec& game, const GneSet& set,
                       const SolverConfig& cfg = {});

/// Best-response table CSV: header
/// `player,type,kappa0,x_0,...,residual_0,...`, one row per player.
void write_best_response_csv(std::ostream& out, const std::vector<BestResponse>& responses,
                             int num_cprs);

/// Parses one CSV line of comma-separated reals; empty fields are rejected.
std::vector<double> parse_csv_row(const std::string& line);

}  // namespace fcpr
