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
#include <random>
#include <vector>

#include "fcpr/dynamics.hpp"
#include "fcpr/solver.hpp"

namespace fcpr {

// Verification record for one candidate profile.
struct GneReport {
  bool feasible = false;
  std::vector<double> utility_gap;   // best-response utility minus own, per player
  std::vector<double> kkt_residual;  // stationarity residual at own coordinates
  std::vector<ResponseKind> type_tags;
  bool verdict = false;
};

/// Checks whether `profile` is a generalized Nash equilibrium: every row must
/// lie inside its player's constraint set, no player may gain more than
/// gap_tol by deviating to a recomputed best response, and the per-player
/// stationarity residuals at the candidate's own coordinates must stay within
/// kkt_tol.
GneReport verify_gne(const GameSpec& game, const StrategyProfile& profile,
                     double gap_tol = 1e-6, double kkt_tol = 1e-6,
                     const SolverConfig& cfg = {});

// Deduplicated set of equilibrium candidates with their per-resource totals.
struct GneSet {
  std::vector<StrategyProfile> points;
  std::vector<std::vector<double>> totals;  // totals[p][j], matching points
  double dedup_eps = 1e-6;
};

/// Samples a profile uniformly from the feasible set: each row is drawn
/// uniformly from the unit simplex with slack.
StrategyProfile random_feasible_profile(int n, int m, std::mt19937_64& rng);

/// Multi-start equilibrium search: runs best-response dynamics from the
/// all-zero profile plus `num_starts` seeded random starts, keeps converged
/// endpoints that pass verify_gne, and deduplicates at dedup_eps after a
/// deterministic sort (totals first, then coordinates).
GneSet find_gne(const GameSpec& game, int num_starts, std::uint64_t seed,
                const DynamicsConfig& dyn = {}, double dedup_eps = 1e-6,
                double gap_tol = 1e-6, double kkt_tol = 1e-6);

/// Solver-free grid search used as a cross-check oracle. Discretizes every
/// player's feasible set with step 1/resolution, keeps profiles where no
/// player has a grid deviation improving utility beyond twice the estimated
/// Lipschitz slack, clusters adjacent survivors, and refines each cluster
/// representative through verify_gne at grid-scale tolerances.
/// Guarded to n*m <= 4 and resolution <= 200; throws NumericError beyond.
GneSet brute_force_gne(const GameSpec& game, int resolution);

struct AntichainResult {
  bool ok = true;
  // Witness pair of point indices when ok is false: totals of `first` are
  // componentwise below totals of `second` with a strictly smaller sum.
  int first = -1;
  int second = -1;
};

/// Checks that the totals vectors of the set form an antichain: no point's
/// totals may be componentwise <= another's (within tol) while having a sum
/// smaller by more than tol.
AntichainResult antichain_check(const GneSet& set, double tol);

// Per-player response kinds and per-resource investor supports at a profile.
struct TypeClassification {
  std::vector<ResponseKind> player_kind;           // from best-response recomputation
  std::vector<double> kappa0;                      // per player, 0 for Type I
  std::vector<std::vector<int>> support;           // investors below their break-even
  std::vector<std::vector<int>> support_type1;
  std::vector<std::vector<int>> support_type2;
};

/// Classifies a verified equilibrium: each player's type and multiplier come
/// from recomputing their best response; resource supports collect investing
/// players whose break-even level exceeds the resource total.
TypeClassification classify_types(const GameSpec& game, const StrategyProfile& profile,
                                  const SolverConfig& cfg = {});

/// Checks the structural ceiling on coexisting equilibria: grouping points by
/// totals vector (within the set's dedup_eps), every group must contain at
/// most 2^(n*(m+1)) points.
bool count_bound_check(const GneSet& set, int n, int m);

}  // namespace fcpr
