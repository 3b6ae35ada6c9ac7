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

#include "fcpr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fcpr {

namespace {

constexpr double kKappaCap = 1099511627776.0;  // 2^40, outer multiplier bracket guard

// Root of a strictly decreasing f on (lo, hi) with f(lo+) > 0 > f(hi-).
// Endpoints are never evaluated, so singular left ends are fine. Returns the
// midpoint once |f| <= root_tol or the interval collapses to rounding width.
template <typename F>
double bisect_decreasing(F&& f, double lo, double hi, double root_tol, int max_iters) {
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < max_iters; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (std::abs(v) <= root_tol) return mid;
    if (v > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

void check_profile_shape(const GameSpec& game, const StrategyProfile& others) {
  if (others.num_players() != game.num_players() || others.num_cprs() != game.num_cprs())
    throw ValidationError("profile: shape does not match the game");
}

double psi_unchecked(const GameSpec& game, int i, int j, double x, double xbar) {
  const double t = x + xbar;
  return x * detail::effective_rate_d1_unchecked(game, i, j, t) +
         game.player(i).a * detail::effective_rate_unchecked(game, i, j, t);
}

// Scaled marginal x^{a-1} * psi(x; xbar) whose level sets drive the
// budget-bound solve. Strictly decreasing in x on (0, omega - xbar).
double scaled_marginal(const GameSpec& game, int i, int j, double x, double xbar) {
  const double a = game.player(i).a;
  const double p = psi_unchecked(game, i, j, x, xbar);
  return (a == 1.0) ? p : std::pow(x, a - 1.0) * p;
}

// Root of the scaled marginal at level kappa on (0, omega - xbar), or 0 when
// the resource drops out (possible only for a = 1, where the marginal at 0+
// is finite).
double invested_share_at_level(const GameSpec& game, int i, int j, double xbar, double w,
                               double kappa, const SolverConfig& cfg) {
  const double hi = w - xbar;
  if (hi <= 0.0) return 0.0;
  const double a = game.player(i).a;
  if (a == 1.0) {
    const double at_zero = detail::effective_rate_unchecked(game, i, j, xbar);  // psi(0) for a = 1
    if (at_zero <= kappa) return 0.0;
  }
  const auto f = [&](double x) { return scaled_marginal(game, i, j, x, xbar) - kappa; };
  return bisect_decreasing(f, 0.0, hi, cfg.root_tol, cfg.max_bisect_iters);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(root_tol > 0.0) || !std::isfinite(root_tol)) throw ValidationError("solver.root_tol: must be > 0");
  if (max_bisect_iters < 1) throw ValidationError("solver.max_bisect_iters: must be >= 1");
  if (!(sum_tol > 0.0) || !std::isfinite(sum_tol)) throw ValidationError("solver.sum_tol: must be > 0");
}

const char* to_string(ResponseKind kind) {
  return kind == ResponseKind::kTypeI ? "TypeI" : "TypeII";
}

double omega(const GameSpec& game, int i, int j, const SolverConfig& cfg) {
  game.check_player(i);
  game.check_cpr(j);
  cfg.validate();
  return game.omega_cache().get_or_compute(i, j, [&]() {
    const double at0 = detail::effective_rate_unchecked(game, i, j, 0.0);
    const double at1 = detail::effective_rate_unchecked(game, i, j, 1.0);
    if (!(at0 > 0.0) || !(at1 < 0.0)) {
      std::ostringstream os;
      os << "omega(" << i << "," << j << "): effective rate does not bracket a root on [0,1]"
         << " (F(0)=" << at0 << ", F(1)=" << at1 << ")";
      throw NumericError(os.str());
    }
    const auto f = [&](double t) { return detail::effective_rate_unchecked(game, i, j, t); };
    const double w = bisect_decreasing(f, 0.0, 1.0, cfg.root_tol, cfg.max_bisect_iters);
    if (std::abs(f(w)) > cfg.root_tol) {
      std::ostringstream os;
      os << "omega(" << i << "," << j << "): residual above tolerance after bisection";
      throw NumericError(os.str());
    }
    return w;
  });
}

std::vector<int> active_set(const GameSpec& game, int i, const StrategyProfile& others,
                            const SolverConfig& cfg) {
  game.check_player(i);
  check_profile_shape(game, others);
  std::vector<int> active;
  for (int j = 0; j < game.num_cprs(); ++j) {
    if (others.total_excluding(j, i) < omega(game, i, j, cfg)) active.push_back(j);
  }
  return active;
}

double psi(const GameSpec& game, int i, int j, double x, double xbar) {
  game.check_player(i);
  game.check_cpr(j);
  if (!(x >= 0.0)) throw ValidationError("psi: x must be >= 0");
  const double t = x + xbar;
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("psi: x + xbar must be in (0,1)");
  return psi_unchecked(game, i, j, x, xbar);
}

std::vector<double> type1_response(const GameSpec& game, int i, const StrategyProfile& others,
                                   const SolverConfig& cfg) {
  game.check_player(i);
  check_profile_shape(game, others);
  cfg.validate();
  std::vector<double> out(static_cast<size_t>(game.num_cprs()), 0.0);
  for (int j : active_set(game, i, others, cfg)) {
    const double xbar = others.total_excluding(j, i);
    const double w = omega(game, i, j, cfg);
    const double hi = w - xbar;
    const double at_lo = psi_unchecked(game, i, j, 0.0, xbar);
    const double at_hi = psi_unchecked(game, i, j, hi, xbar);
    if (!(at_lo > 0.0) || !(at_hi < 0.0)) {
      std::ostringstream os;
      os << "type1_response(" << i << "," << j << "): marginal condition does not bracket a root;"
         << " the game may violate the structural assumptions";
      throw NumericError(os.str());
    }
    const auto f = [&](double x) { return psi_unchecked(game, i, j, x, xbar); };
    out[static_cast<size_t>(j)] = bisect_decreasing(f, 0.0, hi, cfg.root_tol, cfg.max_bisect_iters);
  }
  return out;
}

Type2Result type2_response(const GameSpec& game, int i, const StrategyProfile& others,
                           const SolverConfig& cfg) {
  game.check_player(i);
  check_profile_shape(game, others);
  cfg.validate();
  const int m = game.num_cprs();
  const std::vector<int> active = active_set(game, i, others, cfg);

  std::vector<double> xbar(static_cast<size_t>(m), 0.0);
  std::vector<double> w(static_cast<size_t>(m), 0.0);
  for (int j : active) {
    xbar[static_cast<size_t>(j)] = others.total_excluding(j, i);
    w[static_cast<size_t>(j)] = omega(game, i, j, cfg);
  }
  const auto shares_at = [&](double kappa, std::vector<double>* shares) {
    double sum = 0.0;
    for (int j : active) {
      const double x = invested_share_at_level(game, i, j, xbar[static_cast<size_t>(j)],
                                               w[static_cast<size_t>(j)], kappa, cfg);
      if (shares != nullptr) (*shares)[static_cast<size_t>(j)] = x;
      sum += x;
    }
    return sum;
  };

  const double s0 = shares_at(0.0, nullptr);
  if (s0 < 1.0 - cfg.sum_tol)
    throw ContractError("type2_response: interior candidate fits the budget; route to type1_response");

  double kappa0 = 0.0;
  if (s0 > 1.0) {
    double hi = 1.0;
    while (shares_at(hi, nullptr) >= 1.0) {
      hi *= 2.0;
      if (hi > kKappaCap) throw NumericError("type2_response: multiplier bracket exceeded the cap");
    }
    double lo = 0.0;
    double sum = s0;
    for (int it = 0; it < cfg.max_bisect_iters; ++it) {
      kappa0 = 0.5 * (lo + hi);
      sum = shares_at(kappa0, nullptr);
      if (std::abs(sum - 1.0) <= cfg.sum_tol) break;
      if (sum > 1.0) {
        lo = kappa0;
      } else {
        hi = kappa0;
      }
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;
    }
    if (std::abs(sum - 1.0) > 10.0 * cfg.sum_tol)
      throw NumericError("type2_response: budget equation residual above tolerance");
  }

  Type2Result result;
  result.values.assign(static_cast<size_t>(m), 0.0);
  result.kappa0 = kappa0;
  double sum = shares_at(kappa0, &result.values);
  if (sum > 1.0) {  // settle the row exactly on the budget face
    for (double& v : result.values) v /= sum;
  }
  return result;
}

BestResponse best_response(const GameSpec& game, int i, const StrategyProfile& others,
                           const SolverConfig& cfg) {
  const int m = game.num_cprs();
  BestResponse br;
  br.values.assign(static_cast<size_t>(m), 0.0);
  br.residuals.assign(static_cast<size_t>(m), 0.0);

  const std::vector<int> active = active_set(game, i, others, cfg);
  if (active.empty()) return br;  // nothing profitable: the zero row, trivially interior

  const std::vector<double> interior = type1_response(game, i, others, cfg);
  double sum = 0.0;
  for (double v : interior) sum += v;

  if (sum < 1.0 - cfg.sum_tol) {
    br.kind = ResponseKind::kTypeI;
    br.values = interior;
    for (int j = 0; j < m; ++j) {
      if (br.values[static_cast<size_t>(j)] <= 0.0) continue;
      br.effective_set.push_back(j);
      br.residuals[static_cast<size_t>(j)] =
          psi_unchecked(game, i, j, br.values[static_cast<size_t>(j)], others.total_excluding(j, i));
    }
    return br;
  }

  const Type2Result bound = type2_response(game, i, others, cfg);
  br.kind = ResponseKind::kTypeII;
  br.values = bound.values;
  br.kappa0 = bound.kappa0;
  for (int j = 0; j < m; ++j) {
    const double x = br.values[static_cast<size_t>(j)];
    if (x <= 0.0) continue;
    br.effective_set.push_back(j);
    br.residuals[static_cast<size_t>(j)] =
        scaled_marginal(game, i, j, x, others.total_excluding(j, i)) - bound.kappa0;
  }
  return br;
}

ConstraintBounds constraint_bounds(const GameSpec& game, int i, const StrategyProfile& others,
                                   const SolverConfig& cfg) {
  game.check_player(i);
  check_profile_shape(game, others);
  ConstraintBounds bounds;
  bounds.upper.assign(static_cast<size_t>(game.num_cprs()), 0.0);
  for (int j = 0; j < game.num_cprs(); ++j) {
    const double headroom = omega(game, i, j, cfg) - others.total_excluding(j, i);
    bounds.upper[static_cast<size_t>(j)] = std::max(0.0, headroom);
  }
  return bounds;
}

double g_aux(const GameSpec& game, int i, int j, double t, const SolverConfig& cfg) {
  game.check_player(i);
  game.check_cpr(j);
  const double w = omega(game, i, j, cfg);
  if (!(t > 0.0 && t < w)) throw ValidationError("g_aux: t must be in (0, omega)");
  const double d1 = detail::effective_rate_d1_unchecked(game, i, j, t);
  if (!(d1 < 0.0)) throw NumericError("g_aux: effective rate is not decreasing at t");
  return -game.player(i).a * detail::effective_rate_unchecked(game, i, j, t) / d1;
}

double h_aux(const GameSpec& game, int i, int j, double t, double kappa0, double x,
             const SolverConfig& cfg) {
  game.check_player(i);
  game.check_cpr(j);
  if (!(kappa0 >= 0.0)) throw ValidationError("h_aux: kappa0 must be >= 0");
  if (!(x > 0.0)) throw ValidationError("h_aux: x must be > 0");
  const double w = omega(game, i, j, cfg);
  if (!(t > 0.0 && t < w)) throw ValidationError("h_aux: t must be in (0, omega)");
  const double a = game.player(i).a;
  const double d1 = detail::effective_rate_d1_unchecked(game, i, j, t);
  const double denom = -kappa0 / ((a == 1.0) ? x : std::pow(x, a)) + d1;
  if (!(denom < 0.0)) throw NumericError("h_aux: denominator is not negative at t");
  return -a * detail::effective_rate_unchecked(game, i, j, t) / denom;
}

}  // namespace fcpr
