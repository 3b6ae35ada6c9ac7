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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fcpr/experiments.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment configuration file (JSON)")
      ->required();
  cmd->add_option("--out", flags.out_dir, "output directory (overrides the config's out_dir)");
  cmd->add_option("--seed", flags.seed, "random seed (overrides the config's seed)");
  cmd->add_flag("--quiet", flags.quiet, "suppress progress output");
}

int run(const CommonFlags& flags, fcpr::CommandKind expected) {
  fcpr::ExperimentConfig config = fcpr::load_config(flags.config_path);
  if (config.command != expected) {
    std::cerr << "configuration error: " << flags.config_path << ": config declares a '"
              << fcpr::to_string(config.command) << "' block; this subcommand runs '"
              << fcpr::to_string(expected) << "'\n";
    return fcpr::kExitConfigError;
  }
  if (flags.seed) config.seed = *flags.seed;
  std::string out_dir = !flags.out_dir.empty() ? flags.out_dir
                        : !config.out_dir.empty() ? config.out_dir
                                                  : std::string("out");
  return fcpr::run_command(config, out_dir, flags.quiet, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fragile-cpr: best responses, dynamics, and equilibria of fragile "
               "common-pool resource games"};
  app.require_subcommand(1);

  struct SubcommandSpec {
    const char* name;
    const char* help;
    fcpr::CommandKind kind;
  };
  const SubcommandSpec specs[] = {
      {"solve", "compute every player's best response to a fixed profile", fcpr::CommandKind::kSolve},
      {"dynamics", "iterate best-response dynamics from a start profile", fcpr::CommandKind::kDynamics},
      {"search", "search for equilibria from random starts and run structural checks",
       fcpr::CommandKind::kSearch},
      {"sweep", "repeat an inner command across a grid of one game parameter", fcpr::CommandKind::kSweep},
      {"validate", "check the model assumptions for the configured game", fcpr::CommandKind::kValidate},
  };

  CommonFlags flags[std::size(specs)];
  for (size_t s = 0; s < std::size(specs); ++s) {
    CLI::App* cmd = app.add_subcommand(specs[s].name, specs[s].help);
    add_common_flags(cmd, flags[s]);
    const fcpr::CommandKind kind = specs[s].kind;
    CommonFlags* f = &flags[s];
    cmd->callback([f, kind]() {
      int code = run(*f, kind);
      if (code != fcpr::kExitSuccess) throw CLI::RuntimeError(code);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::RuntimeError& e) {
    return e.get_exit_code();  // command outcome forwarded from the callback
  } catch (const CLI::ParseError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return fcpr::kExitConfigError;
  } catch (const fcpr::ValidationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return fcpr::kExitConfigError;
  } catch (const fcpr::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return fcpr::kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fcpr::kExitNumericError;
  }
  return fcpr::kExitSuccess;
}
