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

#include "fcpr/config.hpp"

namespace fcpr {

// Process exit codes shared by the library runners and the CLI.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitConfigError = 1,   // unparseable or invalid configuration
  kExitNumericError = 2,  // lost bracket, iteration budget, or cost guard
  kExitCheckFailure = 3,  // a structural invariant the theory guarantees failed
};

/// Executes the config's command, writing output files under `out_dir`
/// (created if missing) and human-readable progress to `log` unless `quiet`.
/// Returns an ExitCode; numeric failures are caught and reported, config
/// errors are thrown as ValidationError by the parsing layer before this
/// runs. Identical config and seed produce byte-identical output files.
int run_command(const ExperimentConfig& config, const std::string& out_dir, bool quiet,
                std::ostream& log);

}  // namespace fcpr
