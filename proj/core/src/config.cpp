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

#include "fcpr/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fcpr {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

const json& require(const json& node, const char* key, const std::string& where) {
  const auto it = node.find(key);
  if (it == node.end()) fail(where + "." + key, "missing required field");
  return *it;
}

double as_real(const json& node, const std::string& where) {
  if (!node.is_number()) fail(where, "expected a number");
  return node.get<double>();
}

int as_int(const json& node, const std::string& where) {
  if (!node.is_number_integer()) fail(where, "expected an integer");
  return node.get<int>();
}

std::string as_string(const json& node, const std::string& where) {
  if (!node.is_string()) fail(where, "expected a string");
  return node.get<std::string>();
}

double opt_real(const json& node, const char* key, double fallback, const std::string& where) {
  const auto it = node.find(key);
  return it == node.end() ? fallback : as_real(*it, where + "." + key);
}

int opt_int(const json& node, const char* key, int fallback, const std::string& where) {
  const auto it = node.find(key);
  return it == node.end() ? fallback : as_int(*it, where + "." + key);
}

GameDesc parse_game(const json& node, const std::string& where) {
  if (!node.is_object()) fail(where, "expected an object");
  GameDesc desc;
  const json& players = require(node, "players", where);
  if (!players.is_array() || players.empty()) fail(where + ".players", "expected a nonempty array");
  for (size_t i = 0; i < players.size(); ++i) {
    const std::string pw = where + ".players[" + std::to_string(i) + "]";
    const json& p = players[i];
    if (!p.is_object()) fail(pw, "expected an object");
    PlayerParams params;
    params.a = as_real(require(p, "a", pw), pw + ".a");
    params.k = as_real(require(p, "k", pw), pw + ".k");
    desc.players.push_back(params);
  }
  const json& cprs = require(node, "cprs", where);
  if (!cprs.is_array() || cprs.empty()) fail(where + ".cprs", "expected a nonempty array");
  for (size_t j = 0; j < cprs.size(); ++j) {
    const std::string cw = where + ".cprs[" + std::to_string(j) + "]";
    const json& c = cprs[j];
    if (!c.is_object()) fail(cw, "expected an object");
    CprSpec spec;
    const json& failure = require(c, "failure", cw);
    const std::string ffam = as_string(require(failure, "family", cw + ".failure"), cw + ".failure.family");
    if (ffam == "power") {
      spec.failure = FailureSpec::power(as_real(require(failure, "q", cw + ".failure"), cw + ".failure.q"));
    } else {
      fail(cw + ".failure.family", "unknown family '" + ffam + "' (expected: power)");
    }
    const json& ret = require(c, "return", cw);
    const std::string rfam = as_string(require(ret, "family", cw + ".return"), cw + ".return.family");
    if (rfam == "constant") {
      spec.ret = ReturnSpec::constant(as_real(require(ret, "c", cw + ".return"), cw + ".return.c"));
    } else if (rfam == "exp") {
      spec.ret = ReturnSpec::exponential();
    } else {
      fail(cw + ".return.family", "unknown family '" + rfam + "' (expected: constant, exp)");
    }
    desc.cprs.push_back(spec);
  }
  return desc;
}

StrategyProfile parse_profile(const json& node, const GameDesc& game, const std::string& where) {
  if (!node.is_array()) fail(where, "expected an array of player rows");
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < node.size(); ++i) {
    const json& row = node[i];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array()) fail(rw, "expected an array of investments");
    std::vector<double> values;
    for (size_t j = 0; j < row.size(); ++j) values.push_back(as_real(row[j], rw + "[" + std::to_string(j) + "]"));
    rows.push_back(std::move(values));
  }
  if (rows.size() != game.players.size()) fail(where, "row count must equal the number of players");
  for (const auto& row : rows)
    if (row.size() != game.cprs.size()) fail(where, "row length must equal the number of resources");
  try {
    return StrategyProfile::from_rows(rows);
  } catch (const ValidationError& e) {
    fail(where, e.what());
  }
}

SolverConfig parse_solver(const json& node, const std::string& where) {
  SolverConfig cfg;
  cfg.root_tol = opt_real(node, "root_tol", cfg.root_tol, where);
  cfg.max_bisect_iters = opt_int(node, "max_bisect_iters", cfg.max_bisect_iters, where);
  cfg.sum_tol = opt_real(node, "sum_tol", cfg.sum_tol, where);
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    fail(where, e.what());
  }
  return cfg;
}

DynamicsConfig parse_dynamics_cfg(const json& node, const std::string& where) {
  DynamicsConfig cfg;
  if (const auto it = node.find("schedule"); it != node.end()) {
    const std::string schedule = as_string(*it, where + ".schedule");
    if (schedule == "sequential") {
      cfg.schedule = Schedule::kSequential;
    } else if (schedule == "simultaneous") {
      cfg.schedule = Schedule::kSimultaneous;
    } else {
      fail(where + ".schedule", "expected 'sequential' or 'simultaneous'");
    }
  }
  cfg.conv_tol = opt_real(node, "conv_tol", cfg.conv_tol, where);
  cfg.max_rounds = opt_int(node, "max_rounds", cfg.max_rounds, where);
  cfg.damping = opt_real(node, "damping", cfg.damping, where);
  if (const auto it = node.find("solver"); it != node.end()) cfg.solver = parse_solver(*it, where + ".solver");
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    fail(where, e.what());
  }
  return cfg;
}

SolveBlock parse_solve(const json& node, const GameDesc& game, const std::string& where) {
  SolveBlock block;
  block.profile = parse_profile(require(node, "profile", where), game, where + ".profile");
  if (const auto it = node.find("solver"); it != node.end()) block.solver = parse_solver(*it, where + ".solver");
  return block;
}

DynamicsBlock parse_dynamics(const json& node, const GameDesc& game, const std::string& where) {
  DynamicsBlock block;
  if (const auto it = node.find("start"); it != node.end())
    block.start = parse_profile(*it, game, where + ".start");
  block.cfg = parse_dynamics_cfg(node, where);
  return block;
}

SearchBlock parse_search(const json& node, const std::string& where) {
  SearchBlock block;
  block.num_starts = opt_int(node, "num_starts", block.num_starts, where);
  if (block.num_starts < 0) fail(where + ".num_starts", "must be >= 0");
  block.dedup_eps = opt_real(node, "dedup_eps", block.dedup_eps, where);
  if (!(block.dedup_eps > 0.0)) fail(where + ".dedup_eps", "must be > 0");
  block.gap_tol = opt_real(node, "gap_tol", block.gap_tol, where);
  block.kkt_tol = opt_real(node, "kkt_tol", block.kkt_tol, where);
  if (const auto it = node.find("dynamics"); it != node.end())
    block.dyn = parse_dynamics_cfg(*it, where + ".dynamics");
  return block;
}

ValidateBlock parse_validate(const json& node, const std::string& where) {
  ValidateBlock block;
  block.samples = opt_int(node, "samples", block.samples, where);
  if (block.samples < 2) fail(where + ".samples", "must be >= 2");
  return block;
}

constexpr const char* kCommandKeys[] = {"solve", "dynamics", "search", "sweep", "validate"};

int count_command_blocks(const json& node) {
  int count = 0;
  for (const char* key : kCommandKeys)
    if (node.contains(key)) ++count;
  return count;
}

}  // namespace

const char* to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::kSolve:
      return "solve";
    case CommandKind::kDynamics:
      return "dynamics";
    case CommandKind::kSearch:
      return "search";
    case CommandKind::kSweep:
      return "sweep";
    case CommandKind::kValidate:
      return "validate";
  }
  return "unknown";
}

double* resolve_param_path(GameDesc& desc, const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream stream(path);
  std::string part;
  while (std::getline(stream, part, '.')) parts.push_back(part);

  const auto index_of = [](const std::string& token, size_t limit) -> int {
    if (token.empty()) return -1;
    for (char ch : token)
      if (ch < '0' || ch > '9') return -1;
    const long value = std::strtol(token.c_str(), nullptr, 10);
    if (value < 0 || static_cast<size_t>(value) >= limit) return -1;
    return static_cast<int>(value);
  };

  if (parts.size() == 3 && parts[0] == "players") {
    const int i = index_of(parts[1], desc.players.size());
    if (i < 0) return nullptr;
    if (parts[2] == "a") return &desc.players[static_cast<size_t>(i)].a;
    if (parts[2] == "k") return &desc.players[static_cast<size_t>(i)].k;
    return nullptr;
  }
  if (parts.size() == 4 && parts[0] == "cprs") {
    const int j = index_of(parts[1], desc.cprs.size());
    if (j < 0) return nullptr;
    if (parts[2] == "failure" && parts[3] == "q") return &desc.cprs[static_cast<size_t>(j)].failure.q;
    if (parts[2] == "return" && parts[3] == "c") {
      if (desc.cprs[static_cast<size_t>(j)].ret.family != ReturnFamily::kConstant) return nullptr;
      return &desc.cprs[static_cast<size_t>(j)].ret.c;
    }
    return nullptr;
  }
  return nullptr;
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(origin + ": invalid JSON: " + e.what());
  }
  if (!root.is_object()) throw ValidationError(origin + ": expected a JSON object");

  // Field diagnostics read "<file>: game.players[0].a: <problem>".
  const std::string base = origin + ": ";
  const auto require_top = [&root, &base](const char* key) -> const json& {
    const auto it = root.find(key);
    if (it == root.end()) fail(base + key, "missing required field");
    return *it;
  };

  ExperimentConfig config;
  config.schema_version = as_int(require_top("schema_version"), base + "schema_version");
  if (config.schema_version != kConfigSchemaVersion)
    fail(base + "schema_version",
         "unsupported version " + std::to_string(config.schema_version) + " (expected " +
             std::to_string(kConfigSchemaVersion) + ")");

  config.game = parse_game(require_top("game"), base + "game");
  try {
    config.game.build();  // surface range violations at parse time
  } catch (const ValidationError& e) {
    fail(base + "game", e.what());
  }

  if (const auto it = root.find("seed"); it != root.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 0) fail(base + "seed", "expected a nonnegative integer");
    config.seed = it->get<std::uint64_t>();
  }
  if (const auto it = root.find("out_dir"); it != root.end()) config.out_dir = as_string(*it, base + "out_dir");

  if (count_command_blocks(root) != 1)
    fail(origin, "exactly one command block required (solve, dynamics, search, sweep, or validate)");

  if (root.contains("solve")) {
    config.command = CommandKind::kSolve;
    config.solve = parse_solve(root["solve"], config.game, base + "solve");
  } else if (root.contains("dynamics")) {
    config.command = CommandKind::kDynamics;
    config.dynamics = parse_dynamics(root["dynamics"], config.game, base + "dynamics");
  } else if (root.contains("search")) {
    config.command = CommandKind::kSearch;
    config.search = parse_search(root["search"], base + "search");
  } else if (root.contains("validate")) {
    config.command = CommandKind::kValidate;
    config.validate = parse_validate(root["validate"], base + "validate");
  } else {
    config.command = CommandKind::kSweep;
    const json& node = root["sweep"];
    const std::string where = base + "sweep";
    SweepBlock sweep;
    sweep.path = as_string(require(node, "path", where), where + ".path");
    const json& values = require(node, "values", where);
    if (!values.is_array() || values.empty()) fail(where + ".values", "expected a nonempty array");
    for (size_t v = 0; v < values.size(); ++v)
      sweep.values.push_back(as_real(values[v], where + ".values[" + std::to_string(v) + "]"));

    const json& run = require(node, "run", where);
    if (!run.is_object()) fail(where + ".run", "expected an object");
    const int inner_count = count_command_blocks(run);
    if (inner_count != 1 || run.contains("sweep"))
      fail(where + ".run", "exactly one non-sweep command block required");
    if (run.contains("solve")) {
      sweep.inner = CommandKind::kSolve;
      sweep.solve = parse_solve(run["solve"], config.game, where + ".run.solve");
    } else if (run.contains("dynamics")) {
      sweep.inner = CommandKind::kDynamics;
      sweep.dynamics = parse_dynamics(run["dynamics"], config.game, where + ".run.dynamics");
    } else if (run.contains("search")) {
      sweep.inner = CommandKind::kSearch;
      sweep.search = parse_search(run["search"], where + ".run.search");
    } else {
      sweep.inner = CommandKind::kValidate;
      sweep.validate = parse_validate(run["validate"], where + ".run.validate");
    }

    GameDesc probe = config.game;
    if (resolve_param_path(probe, sweep.path) == nullptr)
      fail(where + ".path", "parameter path '" + sweep.path + "' does not exist");
    for (size_t v = 0; v < sweep.values.size(); ++v) {
      GameDesc trial = config.game;
      *resolve_param_path(trial, sweep.path) = sweep.values[v];
      try {
        trial.build();
      } catch (const ValidationError& e) {
        fail(where + ".values[" + std::to_string(v) + "]", e.what());
      }
    }
    config.sweep = std::move(sweep);
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

}  // namespace fcpr
