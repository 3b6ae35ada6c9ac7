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

#include "fcpr/model.hpp"

namespace fcpr {

// Tolerances and budgets for the bisection-based best-response solver.
struct SolverConfig {
  double root_tol = 1e-10;    // residual target for scalar root finds
  int max_bisect_iters = 200; // per-root iteration budget
  double sum_tol = 1e-9;      // budget-saturation tolerance on row sums

  void validate() const;
};

enum class ResponseKind { kTypeI, kTypeII };

const char* to_string(ResponseKind kind);

// One player's best response against a fixed opponent profile.
//
// Type I: the budget constraint is slack; each invested resource sits at the
// root of its marginal condition and kappa0 = 0.
// Type II: the budget binds; the scaled marginals of all invested resources
// are equalized at the common multiplier kappa0 >= 0.
struct BestResponse {
  ResponseKind kind = ResponseKind::kTypeI;
  std::vector<double> values;     // length m, zero outside the effective set
  std::vector<int> effective_set; // resources with a strictly positive entry
  double kappa0 = 0.0;
  // Per-resource defining-equation residuals at the returned point; zero for
  // resources outside the effective set.
  std::vector<double> residuals;
};

/// Break-even investment level of resource j for player i: the unique root of
/// effective_rate in (0,1). Results are cached per (i,j) on the game; the
/// first computation wins and the cache is safe for concurrent callers.
/// Throws NumericError if the endpoints do not bracket a sign change.
double omega(const GameSpec& game, int i, int j, const SolverConfig& cfg = {});

/// Resources that remain strictly profitable for player i given everyone
/// else's investments: those whose opponent total lies strictly below omega.
/// Row i of `others` is ignored.
std::vector<int> active_set(const GameSpec& game, int i, const StrategyProfile& others,
                            const SolverConfig& cfg = {});

/// Marginal-condition function for player i on resource j: with t = x + xbar,
/// psi = x * d/dt effective_rate(t) + a_i * effective_rate(t). The derivative
/// of the per-resource payoff in own investment is x^{a_i - 1} * psi.
/// Requires x >= 0 and x + xbar in (0,1).
double psi(const GameSpec& game, int i, int j, double x, double xbar);

/// Interior best-response candidate: per active resource, the root of psi on
/// (0, omega - xbar), found by bisection; zero elsewhere. The returned vector
/// is the unconstrained candidate whether or not it fits the unit budget.
std::vector<double> type1_response(const GameSpec& game, int i, const StrategyProfile& others,
                                   const SolverConfig& cfg = {});

struct Type2Result {
  std::vector<double> values;
  double kappa0 = 0.0;
};

/// Budget-bound best response via nested bisection: the inner stage solves
/// each active resource's scaled marginal equation at a trial multiplier, the
/// outer stage drives the total investment to 1. Requires the interior
/// candidate to overshoot the budget; otherwise throws ContractError.
Type2Result type2_response(const GameSpec& game, int i, const StrategyProfile& others,
                           const SolverConfig& cfg = {});

/// Full best response of player i against the others' rows: computes the
/// interior candidate, keeps it when it fits strictly inside the budget, and
/// otherwise re-solves with the budget bound.
BestResponse best_response(const GameSpec& game, int i, const StrategyProfile& others,
                           const SolverConfig& cfg = {});

// Box bounds of player i's constraint set given the others' investments: per
// resource the headroom below omega (zero for saturated resources), plus the
// unit budget cap on the row sum.
struct ConstraintBounds {
  std::vector<double> upper;
  double budget = 1.0;
};

ConstraintBounds constraint_bounds(const GameSpec& game, int i, const StrategyProfile& others,
                                   const SolverConfig& cfg = {});

/// Interior fixed-point auxiliary: g = -a_i * F(t) / F'(t) where F is the
/// effective rate. Strictly decreasing on (0, omega); the interior response b
/// satisfies g(b + xbar) = b. Requires t in (0, omega).
double g_aux(const GameSpec& game, int i, int j, double t, const SolverConfig& cfg = {});

/// Budget-bound fixed-point auxiliary: h = -a_i * F(t) / (-kappa0 / x^{a_i}
/// + F'(t)), with x the player's own share of t. Coincides with g_aux at
/// kappa0 = 0. Requires t in (0, omega), x > 0, kappa0 >= 0.
double h_aux(const GameSpec& game, int i, int j, double t, double kappa0, double x,
             const SolverConfig& cfg = {});

}  // namespace fcpr
