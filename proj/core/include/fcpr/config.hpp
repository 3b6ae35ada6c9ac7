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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fcpr/dynamics.hpp"
#include "fcpr/equilibrium.hpp"
#include "fcpr/model.hpp"

namespace fcpr {

inline constexpr int kConfigSchemaVersion = 1;

// Mutable game description, kept alongside the built GameSpec so parameter
// sweeps can override a single scalar and rebuild.
struct GameDesc {
  std::vector<PlayerParams> players;
  std::vector<CprSpec> cprs;

  GameSpec build() const { return build_game(players, cprs); }
};

/// Resolves a parameter path of the form `players.<i>.a`, `players.<i>.k`,
/// `cprs.<j>.failure.q`, or `cprs.<j>.return.c` to the referenced scalar.
/// Returns nullptr when the path does not name an existing parameter.
double* resolve_param_path(GameDesc& desc, const std::string& path);

enum class CommandKind { kSolve, kDynamics, kSearch, kSweep, kValidate };

const char* to_string(CommandKind kind);

struct SolveBlock {
  StrategyProfile profile;  // fixed profile each best response is taken against
  SolverConfig solver;
};

struct DynamicsBlock {
  std::optional<StrategyProfile> start;  // all-zero when omitted
  DynamicsConfig cfg;
};

struct SearchBlock {
  int num_starts = 10;
  DynamicsConfig dyn;
  double dedup_eps = 1e-6;
  double gap_tol = 1e-6;
  double kkt_tol = 1e-6;
};

struct ValidateBlock {
  int samples = 1000;
};

struct SweepBlock {
  std::string path;
  std::vector<double> values;
  CommandKind inner = CommandKind::kSearch;
  // Exactly one of these matches `inner`; sweeps do not nest.
  std::optional<SolveBlock> solve;
  std::optional<DynamicsBlock> dynamics;
  std::optional<SearchBlock> search;
  std::optional<ValidateBlock> validate;
};

// One experiment file: a versioned schema, a game, and exactly one command
// block. Parsed from JSON with field-level diagnostics.
struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  GameDesc game;
  std::uint64_t seed = 0;
  std::string out_dir;  // empty means "use the CLI default"
  CommandKind command = CommandKind::kSolve;

  std::optional<SolveBlock> solve;
  std::optional<DynamicsBlock> dynamics;
  std::optional<SearchBlock> search;
  std::optional<SweepBlock> sweep;
  std::optional<ValidateBlock> validate;
};

/// Parses and validates an experiment config from a JSON file. Throws
/// ValidationError with the offending field on any schema or range violation,
/// including sweep parameter paths that do not resolve.
ExperimentConfig load_config(const std::string& path);

/// Same, from an in-memory JSON document.
ExperimentConfig parse_config(const std::string& json_text, const std::string& origin = "<memory>");

}  // namespace fcpr
