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

#include "fcpr/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>

#include <json.hpp>

#include "fcpr/io.hpp"

namespace fcpr {

namespace {

using nlohmann::json;

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path.string() + ": cannot open output file");
  out << content;
  if (!out) throw ValidationError(path.string() + ": write failed");
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

std::filesystem::path prepare_dir(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError(out_dir + ": cannot create output directory");
  return dir;
}

json profile_rows(const StrategyProfile& profile) {
  json rows = json::array();
  for (int i = 0; i < profile.num_players(); ++i) {
    json row = json::array();
    for (int j = 0; j < profile.num_cprs(); ++j) row.push_back(profile(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_solve(const GameSpec& game, const SolveBlock& block, const std::filesystem::path& dir,
              bool quiet, std::ostream& log) {
  std::vector<BestResponse> responses;
  responses.reserve(static_cast<size_t>(game.num_players()));
  for (int i = 0; i < game.num_players(); ++i)
    responses.push_back(best_response(game, i, block.profile, block.solver));

  std::ostringstream csv;
  write_best_response_csv(csv, responses, game.num_cprs());
  write_text_file(dir / "solve.csv", csv.str());

  if (!quiet) {
    for (size_t i = 0; i < responses.size(); ++i) {
      const BestResponse& br = responses[i];
      log << "player " << i << ", " << to_string(br.kind) << ", [";
      for (size_t j = 0; j < br.values.size(); ++j) log << (j ? ", " : "") << br.values[j];
      log << "], kappa0=" << br.kappa0 << "\n";
    }
  }
  return kExitSuccess;
}

int run_dynamics(const GameSpec& game, const DynamicsBlock& block, const std::filesystem::path& dir,
                 bool quiet, std::ostream& log) {
  const StrategyProfile start =
      block.start ? *block.start : StrategyProfile(game.num_players(), game.num_cprs());
  const Trajectory traj = run(game, start, block.cfg);

  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  write_text_file(dir / "trajectory.csv", csv.str());

  const TypeClassification cls =
      classify_types(game, traj.profiles.back(), block.cfg.solver);
  json types = json::array();
  for (ResponseKind kind : cls.player_kind) types.push_back(to_string(kind));

  json summary;
  summary["schema_version"] = kConfigSchemaVersion;
  summary["command"] = "dynamics";
  summary["schedule"] = to_string(block.cfg.schedule);
  summary["status"] = to_string(traj.status);
  summary["rounds"] = traj.rounds;
  summary["final_gap"] = traj.final_gap;
  summary["endpoint"] = profile_rows(traj.profiles.back());
  summary["endpoint_types"] = types;
  write_json_file(dir / "summary.json", summary);

  if (!quiet) {
    log << "dynamics: " << to_string(traj.status) << " rounds=" << traj.rounds
        << " final_gap=" << traj.final_gap << " types=[";
    for (size_t i = 0; i < cls.player_kind.size(); ++i)
      log << (i ? ", " : "") << to_string(cls.player_kind[i]);
    log << "]\n";
  }
  return kExitSuccess;
}

int run_search(const GameSpec& game, const SearchBlock& block, std::uint64_t seed,
               const std::filesystem::path& dir, bool quiet, std::ostream& log) {
  const GneSet set = find_gne(game, block.num_starts, seed, block.dyn, block.dedup_eps,
                              block.gap_tol, block.kkt_tol);
  const int n = game.num_players();
  const int m = game.num_cprs();

  std::ostringstream csv;
  write_gne_set_csv(csv, game, set, block.dyn.solver);
  write_text_file(dir / "gne_set.csv", csv.str());

  bool check_failed = false;

  json checks;
  {
    json unique;
    const bool applicable = (m == 1);
    unique["applicable"] = applicable;
    const bool passed = !applicable || set.points.size() <= 1;
    unique["passed"] = passed;
    checks["unique_if_single_cpr"] = unique;
    if (!passed) check_failed = true;
  }
  {
    json antichain;
    const bool premise_met = (n >= m);
    antichain["premise"] = premise_met ? "n>=m" : "premise not met (n<m)";
    antichain["premise_met"] = premise_met;
    const AntichainResult result = antichain_check(set, 1e-6);
    antichain["passed"] = result.ok;
    if (!result.ok) {
      antichain["witness"] = json::array({result.first, result.second});
      if (premise_met) check_failed = true;
    }
    checks["antichain_of_totals"] = antichain;
  }
  {
    json bound;
    const bool passed = count_bound_check(set, n, m);
    bound["passed"] = passed;
    bound["log2_bound"] = n * (m + 1);
    checks["count_bound_per_totals"] = bound;
    if (!passed) check_failed = true;
  }

  json histogram;
  histogram["TypeI"] = 0;
  histogram["TypeII"] = 0;
  json points = json::array();
  for (size_t p = 0; p < set.points.size(); ++p) {
    const TypeClassification cls = classify_types(game, set.points[p], block.dyn.solver);
    json point;
    point["id"] = p;
    point["totals"] = set.totals[p];
    json types = json::array();
    json kappas = json::array();
    for (int i = 0; i < n; ++i) {
      const char* name = to_string(cls.player_kind[static_cast<size_t>(i)]);
      histogram[name] = histogram[name].get<int>() + 1;
      types.push_back(name);
      kappas.push_back(cls.kappa0[static_cast<size_t>(i)]);
    }
    point["types"] = types;
    point["kappa0"] = kappas;
    point["x"] = profile_rows(set.points[p]);
    points.push_back(std::move(point));
  }
  checks["type_histogram"] = histogram;

  json summary;
  summary["schema_version"] = kConfigSchemaVersion;
  summary["command"] = "search";
  summary["seed"] = seed;
  summary["num_starts"] = block.num_starts;
  summary["num_points"] = set.points.size();
  summary["checks"] = checks;
  summary["points"] = points;
  write_json_file(dir / "summary.json", summary);

  if (!quiet) {
    log << "search: " << set.points.size() << " point(s) from " << block.num_starts
        << " seeded start(s) plus the zero start\n";
    log << "checks: " << checks.dump() << "\n";
  }
  return check_failed ? kExitCheckFailure : kExitSuccess;
}

int run_validate(const GameSpec& game, const ValidateBlock& block,
                 const std::filesystem::path& dir, bool quiet, std::ostream& log) {
  const AssumptionReport report = validate_assumptions(game, block.samples);

  json doc;
  doc["schema_version"] = kConfigSchemaVersion;
  doc["command"] = "validate";
  doc["samples"] = block.samples;
  doc["passed"] = report.passed;
  doc["note"] = report.note;
  json violations = json::array();
  for (const AssumptionViolation& v : report.violations) {
    json item;
    item["player"] = v.player;
    item["cpr"] = v.cpr;
    item["t"] = v.t;
    item["condition"] = v.condition;
    violations.push_back(std::move(item));
  }
  doc["violations"] = violations;
  write_json_file(dir / "validate.json", doc);

  if (!quiet) {
    log << "validate: " << (report.passed ? "passed" : "FAILED") << " (" << report.violations.size()
        << " violation(s), " << block.samples << " samples per curve)\n";
    for (const AssumptionViolation& v : report.violations)
      log << "  player=" << v.player << " cpr=" << v.cpr << " t=" << v.t << ": " << v.condition
          << "\n";
  }
  return kExitSuccess;
}

int run_sweep(const ExperimentConfig& config, const std::filesystem::path& dir, bool quiet,
              std::ostream& log) {
  const SweepBlock& sweep = *config.sweep;
  json runs = json::array();
  int worst = kExitSuccess;

  for (size_t v = 0; v < sweep.values.size(); ++v) {
    GameDesc desc = config.game;
    *resolve_param_path(desc, sweep.path) = sweep.values[v];
    const GameSpec game = desc.build();

    std::ostringstream name;
    name << "run_" << std::setw(3) << std::setfill('0') << v;
    const std::filesystem::path subdir = dir / name.str();
    std::filesystem::create_directories(subdir);

    if (!quiet) log << "sweep " << sweep.path << "=" << sweep.values[v] << " -> " << name.str() << "\n";

    int code = kExitSuccess;
    try {
      switch (sweep.inner) {
        case CommandKind::kSolve:
          code = run_solve(game, *sweep.solve, subdir, quiet, log);
          break;
        case CommandKind::kDynamics:
          code = run_dynamics(game, *sweep.dynamics, subdir, quiet, log);
          break;
        case CommandKind::kSearch:
          code = run_search(game, *sweep.search, config.seed, subdir, quiet, log);
          break;
        case CommandKind::kValidate:
          code = run_validate(game, *sweep.validate, subdir, quiet, log);
          break;
        case CommandKind::kSweep:
          throw ContractError("sweep: nested sweeps are rejected at parse time");
      }
    } catch (const NumericError& e) {
      if (!quiet) log << "numeric failure: " << e.what() << "\n";
      code = kExitNumericError;
    }
    json entry;
    entry["value"] = sweep.values[v];
    entry["dir"] = name.str();
    entry["exit_code"] = code;
    runs.push_back(std::move(entry));
    // Check failures outrank numeric failures as the overall verdict.
    if (code == kExitCheckFailure || (code != kExitSuccess && worst != kExitCheckFailure))
      worst = std::max(worst, code);
  }

  json summary;
  summary["schema_version"] = kConfigSchemaVersion;
  summary["command"] = "sweep";
  summary["path"] = sweep.path;
  summary["inner"] = to_string(sweep.inner);
  summary["values"] = sweep.values;
  summary["runs"] = runs;
  write_json_file(dir / "sweep_summary.json", summary);
  return worst;
}

}  // namespace

int run_command(const ExperimentConfig& config, const std::string& out_dir, bool quiet,
                std::ostream& log) {
  try {
    const std::filesystem::path dir = prepare_dir(out_dir);
    switch (config.command) {
      case CommandKind::kSolve:
        return run_solve(config.game.build(), *config.solve, dir, quiet, log);
      case CommandKind::kDynamics:
        return run_dynamics(config.game.build(), *config.dynamics, dir, quiet, log);
      case CommandKind::kSearch:
        return run_search(config.game.build(), *config.search, config.seed, dir, quiet, log);
      case CommandKind::kValidate:
        return run_validate(config.game.build(), *config.validate, dir, quiet, log);
      case CommandKind::kSweep:
        return run_sweep(config, prepare_dir(out_dir), quiet, log);
    }
    return kExitConfigError;
  } catch (const NumericError& e) {
    log << "numeric failure: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const ContractError& e) {
    log << "internal contract failure: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const ValidationError& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace fcpr
