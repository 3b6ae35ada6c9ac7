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

#include "fcpr/io.hpp"

#include <cstdio>
#include <sstream>

namespace fcpr {

std::string format_real(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  if (traj.profiles.empty()) return;
  const int n = traj.profiles.front().num_players();
  const int m = traj.profiles.front().num_cprs();
  out << "round";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) out << ",x_" << i << "_" << j;
  out << ",gap\n";
  for (size_t r = 0; r < traj.profiles.size(); ++r) {
    out << r;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) out << "," << format_real(traj.profiles[r](i, j));
    const double gap = (r == 0) ? 0.0 : traj.profiles[r].max_norm_distance(traj.profiles[r - 1]);
    out << "," << format_real(gap) << "\n";
  }
}

void write_gne_set_csv(std::ostream& out, const GameSpec& game, const GneSet& set,
                       const SolverConfig& cfg) {
  const int m = game.num_cprs();
  out << "id,player,type,kappa0";
  for (int j = 0; j < m; ++j) out << ",x_" << j;
  for (int j = 0; j < m; ++j) out << ",total_" << j;
  out << "\n";
  for (size_t p = 0; p < set.points.size(); ++p) {
    const StrategyProfile& point = set.points[p];
    const TypeClassification cls = classify_types(game, point, cfg);
    for (int i = 0; i < game.num_players(); ++i) {
      out << p << "," << i << "," << to_string(cls.player_kind[static_cast<size_t>(i)]) << ","
          << format_real(cls.kappa0[static_cast<size_t>(i)]);
      for (int j = 0; j < m; ++j) out << "," << format_real(point(i, j));
      for (int j = 0; j < m; ++j) out << "," << format_real(set.totals[p][static_cast<size_t>(j)]);
      out << "\n";
    }
  }
}

void write_best_response_csv(std::ostream& out, const std::vector<BestResponse>& responses,
                             int num_cprs) {
  out << "player,type,kappa0";
  for (int j = 0; j < num_cprs; ++j) out << ",x_" << j;
  for (int j = 0; j < num_cprs; ++j) out << ",residual_" << j;
  out << "\n";
  for (size_t i = 0; i < responses.size(); ++i) {
    const BestResponse& br = responses[i];
    out << i << "," << to_string(br.kind) << "," << format_real(br.kappa0);
    for (int j = 0; j < num_cprs; ++j) out << "," << format_real(br.values[static_cast<size_t>(j)]);
    for (int j = 0; j < num_cprs; ++j) out << "," << format_real(br.residuals[static_cast<size_t>(j)]);
    out << "\n";
  }
}

std::vector<double> parse_csv_row(const std::string& line) {
  if (line.empty()) throw ValidationError("csv: empty row");
  // getline drops a final empty token, so a trailing comma needs its own check.
  if (line.back() == ',') throw ValidationError("csv: empty trailing field");
  std::vector<double> values;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) {
    size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &consumed);
    } catch (const std::exception&) {
      throw ValidationError("csv: empty or non-numeric field '" + cell + "'");
    }
    if (consumed != cell.size())
      throw ValidationError("csv: trailing characters in field '" + cell + "'");
    values.push_back(v);
  }
  return values;
}

}  // namespace fcpr
