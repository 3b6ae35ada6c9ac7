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

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "fcpr/errors.hpp"

namespace fcpr {

// Numerical slack used when checking feasibility of strategy profiles.
inline constexpr double kFeasEps = 1e-9;

// Prospect-theoretic parameters of one player: value curvature `a` and loss
// weight `k`. Requires a in (0,1] and k > 0.
struct PlayerParams {
  double a = 1.0;
  double k = 1.0;
};

enum class FailureFamily { kPower };
enum class ReturnFamily { kConstant, kExp };

// Failure probability p(t) of a resource as a function of its total
// investment. p(0) = 0, p is nondecreasing, and p(t) = 1 for every t >= 1.
struct FailureSpec {
  FailureFamily family = FailureFamily::kPower;
  double q = 2.0;  // power exponent, q >= 1

  static FailureSpec power(double q) { return {FailureFamily::kPower, q}; }

  double value(double t) const;
  // First/second derivative; valid on (0,1), identically 0 beyond 1 where the
  // probability is clamped.
  double deriv(double t) const;
  double deriv2(double t) const;
};

// Rate of return R(t) of a resource that did not fail, as a function of its
// total investment. R > 1 on the open unit interval for every built-in family.
struct ReturnSpec {
  ReturnFamily family = ReturnFamily::kConstant;
  double c = 1.0;  // premium above 1 for the constant family, c > 0

  static ReturnSpec constant(double c) { return {ReturnFamily::kConstant, c}; }
  static ReturnSpec exponential() { return {ReturnFamily::kExp, 0.0}; }

  double value(double t) const;
  double deriv(double t) const;
  double deriv2(double t) const;
};

// One common-pool resource: a failure-probability curve and a return curve.
struct CprSpec {
  FailureSpec failure;
  ReturnSpec ret;
};

namespace detail {

// Lazily filled, write-once-per-key cache for per-(player, resource) scalars.
// Shared by all copies of a GameSpec; safe for concurrent callers.
class ScalarCache {
 public:
  ScalarCache(int n, int m) : m_(m), values_(static_cast<size_t>(n) * m), filled_(static_cast<size_t>(n) * m, 0) {}

  template <typename Fill>
  double get_or_compute(int i, int j, Fill&& fill) const {
    const size_t key = static_cast<size_t>(i) * m_ + j;
    std::lock_guard<std::mutex> lock(mu_);
    if (!filled_[key]) {
      values_[key] = fill();  // first writer wins; fills are idempotent
      filled_[key] = 1;
    }
    return values_[key];
  }

 private:
  mutable std::mutex mu_;
  int m_;
  mutable std::vector<double> values_;
  mutable std::vector<char> filled_;
};

}  // namespace detail

// Immutable description of a fragile multi-CPR game: n players with unit
// budgets investing across m independent fragile resources.
class GameSpec {
 public:
  int num_players() const { return static_cast<int>(players_.size()); }
  int num_cprs() const { return static_cast<int>(cprs_.size()); }
  const PlayerParams& player(int i) const { return players_[static_cast<size_t>(i)]; }
  const CprSpec& cpr(int j) const { return cprs_[static_cast<size_t>(j)]; }
  const std::vector<PlayerParams>& players() const { return players_; }
  const std::vector<CprSpec>& cprs() const { return cprs_; }

  detail::ScalarCache& omega_cache() const { return *omega_cache_; }

  void check_player(int i) const;
  void check_cpr(int j) const;

 private:
  friend GameSpec build_game(std::vector<PlayerParams>, std::vector<CprSpec>);
  GameSpec(std::vector<PlayerParams> players, std::vector<CprSpec> cprs);

  std::vector<PlayerParams> players_;
  std::vector<CprSpec> cprs_;
  std::shared_ptr<detail::ScalarCache> omega_cache_;
};

/// Validates parameter ranges and assembles an immutable game description.
/// Throws ValidationError with a field-level message on the first violation.
GameSpec build_game(std::vector<PlayerParams> players, std::vector<CprSpec> cprs);

// An n-by-m investment matrix. Row i is player i's allocation across the m
// resources; feasible rows are componentwise nonnegative and sum to at most 1.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  StrategyProfile(int n, int m) : n_(n), m_(m), x_(static_cast<size_t>(n) * m, 0.0) {}

  /// Builds a profile from per-player rows and validates feasibility.
  static StrategyProfile from_rows(const std::vector<std::vector<double>>& rows);

  int num_players() const { return n_; }
  int num_cprs() const { return m_; }

  double operator()(int i, int j) const { return x_[static_cast<size_t>(i) * m_ + j]; }
  double& operator()(int i, int j) { return x_[static_cast<size_t>(i) * m_ + j]; }

  std::span<const double> row(int i) const { return {x_.data() + static_cast<size_t>(i) * m_, static_cast<size_t>(m_)}; }
  void set_row(int i, std::span<const double> values);

  double row_sum(int i) const;
  // Total investment in resource j across all players.
  double total(int j) const;
  // Total investment in resource j by everyone except player i.
  double total_excluding(int j, int i) const;
  std::vector<double> totals() const;

  /// Throws ValidationError unless every entry is in [0,1] and every row sums
  /// to at most 1, within kFeasEps of numerical slack.
  void validate() const;

  double max_norm_distance(const StrategyProfile& other) const;

  std::span<const double> flat() const { return x_; }

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<double> x_;
};

/// Effective rate of return of resource j for player i at total investment t:
/// the prospect-weighted return on the surviving branch minus the weighted
/// loss on the failing branch. Accepts any t >= 0; beyond t = 1 the failure
/// probability is saturated and the value is exactly -k_i.
double effective_rate(const GameSpec& game, int i, int j, double t);

enum class DerivPath { kClosedForm, kFiniteDifference };

struct DerivResult {
  double value = 0.0;
  DerivPath path = DerivPath::kClosedForm;
};

/// First (order 1) or second (order 2) derivative of effective_rate in t,
/// for t in (0,1). Built-in families evaluate in closed form; the result
/// records which path produced the value.
DerivResult effective_rate_deriv(const GameSpec& game, int i, int j, double t, int order);

/// Central finite-difference fallback for the same derivatives, with step
/// 1e-6 (order 1) or 1e-4 (order 2). Used as a cross-check oracle; requires
/// the stencil to stay inside (0,1).
double finite_difference_deriv(const GameSpec& game, int i, int j, double t, int order);

/// Player i's total utility at the profile: sum over resources of
/// x_ij^{a_i} * effective_rate at that resource's total, with the convention
/// that a zero investment contributes exactly zero.
double utility(const GameSpec& game, const StrategyProfile& profile, int i);

struct AssumptionViolation {
  int player = -1;  // -1 when the condition does not involve a player
  int cpr = -1;
  double t = 0.0;
  std::string condition;
};

struct AssumptionReport {
  bool passed = true;
  std::vector<AssumptionViolation> violations;
  // Grid sampling is a sound-but-incomplete check; a pass is not a proof.
  std::string note;
};

/// Samples each resource curve on a uniform grid of `samples` interior points
/// of (0,1) and checks the structural assumptions the solver relies on:
/// p(0) = 0 and p saturated at 1, R > 1, and for every player both the first
/// and second derivative of effective_rate strictly negative.
AssumptionReport validate_assumptions(const GameSpec& game, int samples = 1000);

namespace detail {

// Clamp-extended evaluations used by the solver hot path: defined for every
// t >= 0, with the failure probability saturated (p = 1, derivatives 0) from
// t = 1 onward so the curves extend flat.
double effective_rate_unchecked(const GameSpec& game, int i, int j, double t);
double effective_rate_d1_unchecked(const GameSpec& game, int i, int j, double t);
double effective_rate_d2_unchecked(const GameSpec& game, int i, int j, double t);

}  // namespace detail

}  // namespace fcpr
