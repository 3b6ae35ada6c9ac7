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

#include "fcpr/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fcpr {

namespace {

std::string field(const std::string& name, int index, const std::string& rest) {
  std::ostringstream os;
  os << name << "[" << index << "]" << rest;
  return os.str();
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double FailureSpec::value(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return std::pow(t, q);
}

double FailureSpec::deriv(double t) const {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return q * std::pow(t, q - 1.0);
}

double FailureSpec::deriv2(double t) const {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return q * (q - 1.0) * std::pow(t, q - 2.0);
}

double ReturnSpec::value(double t) const {
  switch (family) {
    case ReturnFamily::kConstant:
      return c + 1.0;
    case ReturnFamily::kExp:
      return 2.0 - std::exp(t - 1.0);
  }
  return 0.0;
}

double ReturnSpec::deriv(double t) const {
  switch (family) {
    case ReturnFamily::kConstant:
      return 0.0;
    case ReturnFamily::kExp:
      return -std::exp(t - 1.0);
  }
  return 0.0;
}

double ReturnSpec::deriv2(double t) const { return deriv(t); }  // both families: R'' == R'

GameSpec::GameSpec(std::vector<PlayerParams> players, std::vector<CprSpec> cprs)
    : players_(std::move(players)),
      cprs_(std::move(cprs)),
      omega_cache_(std::make_shared<detail::ScalarCache>(static_cast<int>(players_.size()),
                                                         static_cast<int>(cprs_.size()))) {}

void GameSpec::check_player(int i) const {
  if (i < 0 || i >= num_players()) throw ValidationError(field("players", i, ": index out of range"));
}

void GameSpec::check_cpr(int j) const {
  if (j < 0 || j >= num_cprs()) throw ValidationError(field("cprs", j, ": index out of range"));
}

GameSpec build_game(std::vector<PlayerParams> players, std::vector<CprSpec> cprs) {
  if (players.empty()) throw ValidationError("players: at least one player required");
  if (cprs.empty()) throw ValidationError("cprs: at least one resource required");
  for (size_t i = 0; i < players.size(); ++i) {
    const PlayerParams& p = players[i];
    if (!std::isfinite(p.a) || p.a <= 0.0 || p.a > 1.0)
      throw ValidationError(field("players", static_cast<int>(i), ".a: must be in (0,1]"));
    if (!finite_positive(p.k))
      throw ValidationError(field("players", static_cast<int>(i), ".k: must be > 0"));
  }
  for (size_t j = 0; j < cprs.size(); ++j) {
    const CprSpec& c = cprs[j];
    if (c.failure.family != FailureFamily::kPower)
      throw ValidationError(field("cprs", static_cast<int>(j), ".failure.family: unknown family"));
    if (!std::isfinite(c.failure.q) || c.failure.q < 1.0)
      throw ValidationError(field("cprs", static_cast<int>(j), ".failure.q: must be >= 1"));
    switch (c.ret.family) {
      case ReturnFamily::kConstant:
        if (!finite_positive(c.ret.c))
          throw ValidationError(field("cprs", static_cast<int>(j), ".return.c: must be > 0"));
        break;
      case ReturnFamily::kExp:
        break;
      default:
        throw ValidationError(field("cprs", static_cast<int>(j), ".return.family: unknown family"));
    }
  }
  return GameSpec(std::move(players), std::move(cprs));
}

StrategyProfile StrategyProfile::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("profile: at least one row required");
  const int n = static_cast<int>(rows.size());
  const int m = static_cast<int>(rows[0].size());
  StrategyProfile p(n, m);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != m)
      throw ValidationError(field("profile", i, ": rows must have equal length"));
    for (int j = 0; j < m; ++j) p(i, j) = rows[i][j];
  }
  p.validate();
  return p;
}

void StrategyProfile::set_row(int i, std::span<const double> values) {
  for (int j = 0; j < m_; ++j) x_[static_cast<size_t>(i) * m_ + j] = values[static_cast<size_t>(j)];
}

double StrategyProfile::row_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < m_; ++j) s += (*this)(i, j);
  return s;
}

double StrategyProfile::total(int j) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, j);
  return s;
}

double StrategyProfile::total_excluding(int j, int i) const { return total(j) - (*this)(i, j); }

std::vector<double> StrategyProfile::totals() const {
  std::vector<double> t(static_cast<size_t>(m_));
  for (int j = 0; j < m_; ++j) t[static_cast<size_t>(j)] = total(j);
  return t;
}

void StrategyProfile::validate() const {
  if (n_ <= 0 || m_ <= 0) throw ValidationError("profile: empty");
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < m_; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < -kFeasEps || v > 1.0 + kFeasEps) {
        std::ostringstream os;
        os << "profile[" << i << "][" << j << "]: entry " << v << " outside [0,1]";
        throw ValidationError(os.str());
      }
    }
    const double s = row_sum(i);
    if (s > 1.0 + kFeasEps) {
      std::ostringstream os;
      os << "profile[" << i << "]: row sum " << s << " exceeds the unit budget";
      throw ValidationError(os.str());
    }
  }
}

double StrategyProfile::max_norm_distance(const StrategyProfile& other) const {
  double d = 0.0;
  for (size_t idx = 0; idx < x_.size(); ++idx) d = std::max(d, std::abs(x_[idx] - other.x_[idx]));
  return d;
}

namespace detail {

double effective_rate_unchecked(const GameSpec& game, int i, int j, double t) {
  const PlayerParams& pl = game.player(i);
  if (t >= 1.0) return -pl.k;  // failure probability saturated
  const CprSpec& c = game.cpr(j);
  const double p = c.failure.value(t);
  const double base = c.ret.value(t) - 1.0;
  const double gain = (pl.a == 1.0) ? base : std::pow(base, pl.a);
  return gain * (1.0 - p) - pl.k * p;
}

double effective_rate_d1_unchecked(const GameSpec& game, int i, int j, double t) {
  if (t >= 1.0) return 0.0;  // flat beyond saturation
  const PlayerParams& pl = game.player(i);
  const CprSpec& c = game.cpr(j);
  const double a = pl.a;
  const double p = c.failure.value(t);
  const double dp = c.failure.deriv(t);
  const double base = c.ret.value(t) - 1.0;
  const double dr = c.ret.deriv(t);
  const double gain = (a == 1.0) ? base : std::pow(base, a);
  const double dgain = (dr == 0.0) ? 0.0 : a * std::pow(base, a - 1.0) * dr;
  return dgain * (1.0 - p) - (gain + pl.k) * dp;
}

double effective_rate_d2_unchecked(const GameSpec& game, int i, int j, double t) {
  if (t >= 1.0) return 0.0;
  const PlayerParams& pl = game.player(i);
  const CprSpec& c = game.cpr(j);
  const double a = pl.a;
  const double p = c.failure.value(t);
  const double dp = c.failure.deriv(t);
  const double d2p = c.failure.deriv2(t);
  const double base = c.ret.value(t) - 1.0;
  const double dr = c.ret.deriv(t);
  const double d2r = c.ret.deriv2(t);
  const double gain = (a == 1.0) ? base : std::pow(base, a);
  double out = -(gain + pl.k) * d2p;
  if (dr != 0.0 || d2r != 0.0) {
    const double pow1 = std::pow(base, a - 1.0);
    const double pow2 = std::pow(base, a - 2.0);
    out += a * (a - 1.0) * pow2 * dr * dr * (1.0 - p);
    out += a * pow1 * d2r * (1.0 - p);
    out -= 2.0 * a * pow1 * dr * dp;
  }
  return out;
}

}  // namespace detail

double effective_rate(const GameSpec& game, int i, int j, double t) {
  game.check_player(i);
  game.check_cpr(j);
  if (!std::isfinite(t) || t < 0.0) throw ValidationError("effective_rate: t must be >= 0");
  return detail::effective_rate_unchecked(game, i, j, t);
}

DerivResult effective_rate_deriv(const GameSpec& game, int i, int j, double t, int order) {
  game.check_player(i);
  game.check_cpr(j);
  if (order != 1 && order != 2) throw ValidationError("effective_rate_deriv: order must be 1 or 2");
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("effective_rate_deriv: t must be in (0,1)");
  // Every built-in family pair carries closed-form derivatives.
  const double v = (order == 1) ? detail::effective_rate_d1_unchecked(game, i, j, t)
                                : detail::effective_rate_d2_unchecked(game, i, j, t);
  return {v, DerivPath::kClosedForm};
}

double finite_difference_deriv(const GameSpec& game, int i, int j, double t, int order) {
  game.check_player(i);
  game.check_cpr(j);
  if (order != 1 && order != 2) throw ValidationError("finite_difference_deriv: order must be 1 or 2");
  const double h = (order == 1) ? 1e-6 : 1e-4;
  if (!(t - h > 0.0 && t + h < 1.0))
    throw ValidationError("finite_difference_deriv: stencil must stay inside (0,1)");
  const auto f = [&](double s) { return detail::effective_rate_unchecked(game, i, j, s); };
  if (order == 1) return (f(t + h) - f(t - h)) / (2.0 * h);
  return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
}

double utility(const GameSpec& game, const StrategyProfile& profile, int i) {
  game.check_player(i);
  if (profile.num_players() != game.num_players() || profile.num_cprs() != game.num_cprs())
    throw ValidationError("profile: shape does not match the game");
  const double a = game.player(i).a;
  double v = 0.0;
  for (int j = 0; j < game.num_cprs(); ++j) {
    const double x = profile(i, j);
    if (x <= 0.0) continue;  // zero investment contributes exactly zero
    const double rate = detail::effective_rate_unchecked(game, i, j, profile.total(j));
    v += ((a == 1.0) ? x : std::pow(x, a)) * rate;
  }
  return v;
}

AssumptionReport validate_assumptions(const GameSpec& game, int samples) {
  if (samples < 3) throw ValidationError("samples: must be >= 3");
  AssumptionReport report;
  report.note = "grid sampling check on the open unit interval; a pass is not a proof";
  auto flag = [&](int player, int cpr, double t, const std::string& condition) {
    report.passed = false;
    report.violations.push_back({player, cpr, t, condition});
  };
  for (int j = 0; j < game.num_cprs(); ++j) {
    const CprSpec& c = game.cpr(j);
    if (c.failure.value(0.0) != 0.0) flag(-1, j, 0.0, "p(0) != 0");
    if (c.failure.value(1.0) != 1.0) flag(-1, j, 1.0, "p(1) != 1");
    for (int s = 1; s <= samples; ++s) {
      const double t = static_cast<double>(s) / (samples + 1);
      if (!(c.ret.value(t) > 1.0)) {
        flag(-1, j, t, "R <= 1");
        break;
      }
    }
    for (int i = 0; i < game.num_players(); ++i) {
      bool d1_ok = true;
      bool d2_ok = true;
      for (int s = 1; s <= samples && (d1_ok || d2_ok); ++s) {
        const double t = static_cast<double>(s) / (samples + 1);
        if (d1_ok && !(detail::effective_rate_d1_unchecked(game, i, j, t) < 0.0)) {
          flag(i, j, t, "effective rate not strictly decreasing");
          d1_ok = false;
        }
        if (d2_ok && !(detail::effective_rate_d2_unchecked(game, i, j, t) < 0.0)) {
          flag(i, j, t, "effective rate not strictly concave");
          d2_ok = false;
        }
      }
    }
  }
  return report;
}

}  // namespace fcpr
