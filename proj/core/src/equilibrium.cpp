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

#include "fcpr/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace fcpr {

namespace {

// Marginal condition evaluated through the clamp-extended curves, so it stays
// finite for any nonnegative total (unlike the checked public psi).
double psi_at(const GameSpec& game, int i, int j, double x, double xbar) {
  const double t = x + xbar;
  return x * detail::effective_rate_d1_unchecked(game, i, j, t) +
         game.player(i).a * detail::effective_rate_unchecked(game, i, j, t);
}

double scaled_marginal_at(const GameSpec& game, int i, int j, double x, double xbar) {
  const double a = game.player(i).a;
  const double p = psi_at(game, i, j, x, xbar);
  return (a == 1.0) ? p : std::pow(x, a - 1.0) * p;
}

double utility_with_row(const GameSpec& game, const StrategyProfile& profile, int i,
                        std::span<const double> row) {
  StrategyProfile changed = profile;
  changed.set_row(i, row);
  return utility(game, changed, i);
}

// Stationarity residual of player i's own row. Interior rows must zero the
// marginal condition on every invested resource; budget-bound rows must
// equalize the scaled marginals at a common nonnegative multiplier.
double candidate_kkt_residual(const GameSpec& game, const StrategyProfile& profile, int i,
                              bool budget_bound) {
  std::vector<int> invested;
  for (int j = 0; j < game.num_cprs(); ++j)
    if (profile(i, j) > 0.0) invested.push_back(j);
  if (invested.empty()) return 0.0;

  if (!budget_bound) {
    double r = 0.0;
    for (int j : invested)
      r = std::max(r, std::abs(psi_at(game, i, j, profile(i, j), profile.total_excluding(j, i))));
    return r;
  }
  double mean = 0.0;
  std::vector<double> levels;
  levels.reserve(invested.size());
  for (int j : invested) {
    levels.push_back(scaled_marginal_at(game, i, j, profile(i, j), profile.total_excluding(j, i)));
    mean += levels.back();
  }
  mean /= static_cast<double>(levels.size());
  double r = std::max(0.0, -mean);  // the shared multiplier must be nonnegative
  for (double level : levels) r = std::max(r, std::abs(level - mean));
  return r;
}

bool totals_then_coords_less(const StrategyProfile& lhs, const StrategyProfile& rhs) {
  const std::vector<double> lt = lhs.totals();
  const std::vector<double> rt = rhs.totals();
  if (lt != rt) return lt < rt;
  const std::span<const double> lf = lhs.flat();
  const std::span<const double> rf = rhs.flat();
  return std::lexicographical_compare(lf.begin(), lf.end(), rf.begin(), rf.end());
}

GneSet assemble_set(std::vector<StrategyProfile> candidates, double dedup_eps) {
  std::sort(candidates.begin(), candidates.end(), totals_then_coords_less);
  GneSet set;
  set.dedup_eps = dedup_eps;
  for (StrategyProfile& candidate : candidates) {
    bool fresh = true;
    for (const StrategyProfile& kept : set.points) {
      if (candidate.max_norm_distance(kept) <= dedup_eps) {
        fresh = false;
        break;
      }
    }
    if (fresh) {
      set.totals.push_back(candidate.totals());
      set.points.push_back(std::move(candidate));
    }
  }
  return set;
}

}  // namespace

GneReport verify_gne(const GameSpec& game, const StrategyProfile& profile, double gap_tol,
                     double kkt_tol, const SolverConfig& cfg) {
  profile.validate();
  if (profile.num_players() != game.num_players() || profile.num_cprs() != game.num_cprs())
    throw ValidationError("profile: shape does not match the game");
  const int n = game.num_players();

  GneReport report;
  report.feasible = true;
  report.utility_gap.assign(static_cast<size_t>(n), 0.0);
  report.kkt_residual.assign(static_cast<size_t>(n), 0.0);
  report.type_tags.assign(static_cast<size_t>(n), ResponseKind::kTypeI);

  for (int i = 0; i < n; ++i) {
    const ConstraintBounds bounds = constraint_bounds(game, i, profile, cfg);
    for (int j = 0; j < game.num_cprs(); ++j) {
      if (profile(i, j) > bounds.upper[static_cast<size_t>(j)] + kFeasEps) report.feasible = false;
    }
    const bool budget_bound = profile.row_sum(i) >= 1.0 - cfg.sum_tol;
    report.type_tags[static_cast<size_t>(i)] =
        budget_bound ? ResponseKind::kTypeII : ResponseKind::kTypeI;

    const BestResponse br = best_response(game, i, profile, cfg);
    report.utility_gap[static_cast<size_t>(i)] =
        utility_with_row(game, profile, i, br.values) - utility(game, profile, i);
    report.kkt_residual[static_cast<size_t>(i)] =
        candidate_kkt_residual(game, profile, i, budget_bound);
  }

  double worst_gap = 0.0;
  double worst_kkt = 0.0;
  for (int i = 0; i < n; ++i) {
    worst_gap = std::max(worst_gap, report.utility_gap[static_cast<size_t>(i)]);
    worst_kkt = std::max(worst_kkt, report.kkt_residual[static_cast<size_t>(i)]);
  }
  report.verdict = report.feasible && worst_gap <= gap_tol && worst_kkt <= kkt_tol;
  return report;
}

StrategyProfile random_feasible_profile(int n, int m, std::mt19937_64& rng) {
  // Exponential spacings normalized with one slack coordinate sample each row
  // uniformly from the simplex {x >= 0, sum x <= 1}.
  StrategyProfile profile(n, m);
  for (int i = 0; i < n; ++i) {
    double spacings[64];
    double sum = 0.0;
    for (int j = 0; j <= m; ++j) {
      const double u = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // in (0,1]
      spacings[j] = -std::log(u);
      sum += spacings[j];
    }
    for (int j = 0; j < m; ++j) profile(i, j) = (sum > 0.0) ? spacings[j] / sum : 0.0;
  }
  return profile;
}

GneSet find_gne(const GameSpec& game, int num_starts, std::uint64_t seed,
                const DynamicsConfig& dyn, double dedup_eps, double gap_tol, double kkt_tol) {
  if (num_starts < 0) throw ValidationError("num_starts: must be >= 0");
  if (!(dedup_eps > 0.0)) throw ValidationError("dedup_eps: must be > 0");
  dyn.validate();
  if (game.num_cprs() > 60) throw ValidationError("game: too many resources for the start sampler");

  std::mt19937_64 rng(seed);
  std::vector<StrategyProfile> starts;
  starts.reserve(static_cast<size_t>(num_starts) + 1);
  starts.emplace_back(game.num_players(), game.num_cprs());  // the all-zero profile
  for (int s = 0; s < num_starts; ++s)
    starts.push_back(random_feasible_profile(game.num_players(), game.num_cprs(), rng));

  std::vector<StrategyProfile> hits;
  for (const StrategyProfile& start : starts) {
    const Trajectory traj = run(game, start, dyn);
    if (traj.status != RunStatus::kConverged) continue;
    const StrategyProfile& endpoint = traj.profiles.back();
    if (verify_gne(game, endpoint, gap_tol, kkt_tol, dyn.solver).verdict) hits.push_back(endpoint);
  }
  return assemble_set(std::move(hits), dedup_eps);
}

namespace {

// Fixed-size unit-coordinate views used by the grid oracle (n*m <= 4).
using Units = std::array<int, 4>;

uint64_t pack_units(const Units& u, int count) {
  uint64_t key = 0;
  for (int d = 0; d < count; ++d) key = (key << 16) | static_cast<uint64_t>(u[static_cast<size_t>(d)]);
  return key;
}

}  // namespace

GneSet brute_force_gne(const GameSpec& game, int resolution) {
  const int n = game.num_players();
  const int m = game.num_cprs();
  if (n * m > 4) throw NumericError("brute_force_gne: cost guard requires n*m <= 4");
  if (resolution < 1 || resolution > 200)
    throw NumericError("brute_force_gne: cost guard requires resolution in [1,200]");
  const double h = 1.0 / resolution;

  // Per-player grid strategies over the budget simplex, in units of h.
  std::vector<std::vector<int>> strategies;
  {
    std::vector<int> current(static_cast<size_t>(m), 0);
    const auto recurse = [&](auto&& self, int dim, int left) -> void {
      if (dim == m) {
        strategies.push_back(current);
        return;
      }
      for (int u = 0; u <= left; ++u) {
        current[static_cast<size_t>(dim)] = u;
        self(self, dim + 1, left - u);
      }
      current[static_cast<size_t>(dim)] = 0;
    };
    recurse(recurse, 0, resolution);
  }
  const int num_strats = static_cast<int>(strategies.size());

  // Value tables: own-share powers and effective rates at every grid total.
  const int max_total_units = n * resolution;
  std::vector<std::vector<double>> pow_tab(static_cast<size_t>(n));
  std::vector<std::vector<std::vector<double>>> f_tab(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = game.player(i).a;
    pow_tab[static_cast<size_t>(i)].resize(static_cast<size_t>(resolution) + 1);
    for (int u = 0; u <= resolution; ++u)
      pow_tab[static_cast<size_t>(i)][static_cast<size_t>(u)] =
          (u == 0) ? 0.0 : ((a == 1.0) ? u * h : std::pow(u * h, a));
    f_tab[static_cast<size_t>(i)].resize(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
      auto& column = f_tab[static_cast<size_t>(i)][static_cast<size_t>(j)];
      column.resize(static_cast<size_t>(max_total_units) + 1);
      for (int tu = 0; tu <= max_total_units; ++tu)
        column[static_cast<size_t>(tu)] = detail::effective_rate_unchecked(game, i, j, tu * h);
    }
  }

  const auto value = [&](int i, const int* z, const int* t) {
    double v = 0.0;
    const auto& powers = pow_tab[static_cast<size_t>(i)];
    const auto& rates = f_tab[static_cast<size_t>(i)];
    for (int j = 0; j < m; ++j) {
      if (z[j] == 0) continue;
      v += powers[static_cast<size_t>(z[j])] * rates[static_cast<size_t>(j)][static_cast<size_t>(z[j] + t[j])];
    }
    return v;
  };

  // Lipschitz slack per player: grid step times the largest sampled slope of
  // the utility in one own coordinate, probed deterministically.
  std::vector<double> slack(static_cast<size_t>(n), 0.0);
  {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    for (int i = 0; i < n; ++i) {
      double max_slope = 1e-9;
      const auto probe = [&](const std::vector<int>& z, int coord, const Units& t) {
        int row_units = 0;
        for (int j = 0; j < m; ++j) row_units += z[static_cast<size_t>(j)];
        if (row_units >= resolution) return;
        std::vector<int> up = z;
        up[static_cast<size_t>(coord)] += 1;
        const double slope =
            std::abs(value(i, up.data(), t.data()) - value(i, z.data(), t.data())) / h;
        max_slope = std::max(max_slope, slope);
      };
      Units zero_t{};
      const std::vector<int> origin(static_cast<size_t>(m), 0);
      for (int j = 0; j < m; ++j) probe(origin, j, zero_t);
      for (int trial = 0; trial < 512; ++trial) {
        const auto& z = strategies[static_cast<size_t>(rng() % static_cast<uint64_t>(num_strats))];
        const int coord = static_cast<int>(rng() % static_cast<uint64_t>(m));
        Units t{};
        for (int j = 0; j < m; ++j)
          t[static_cast<size_t>(j)] =
              static_cast<int>(rng() % static_cast<uint64_t>((n - 1) * resolution + 1));
        probe(z, coord, t);
      }
      slack[static_cast<size_t>(i)] = max_slope * h;
    }
  }

  // Best grid utility per player for each reachable opponent configuration.
  // n == 1 needs a single scalar, n == 2 indexes by the opponent's strategy,
  // and larger n (then m == 1) indexes by the opponent total.
  std::vector<double> maxdev_solo(static_cast<size_t>(n), 0.0);
  std::vector<std::vector<double>> maxdev_by_strat(static_cast<size_t>(n));
  std::vector<std::vector<double>> maxdev_by_total(static_cast<size_t>(n));
  const auto best_grid_utility = [&](int i, const Units& t) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : strategies) best = std::max(best, value(i, z.data(), t.data()));
    return best;
  };
  if (n == 1) {
    Units zero_t{};
    maxdev_solo[0] = best_grid_utility(0, zero_t);
  } else if (n == 2) {
    for (int i = 0; i < n; ++i) {
      auto& table = maxdev_by_strat[static_cast<size_t>(i)];
      table.resize(static_cast<size_t>(num_strats));
      for (int s = 0; s < num_strats; ++s) {
        Units t{};
        for (int j = 0; j < m; ++j) t[static_cast<size_t>(j)] = strategies[static_cast<size_t>(s)][static_cast<size_t>(j)];
        table[static_cast<size_t>(s)] = best_grid_utility(i, t);
      }
    }
  } else {  // m == 1
    for (int i = 0; i < n; ++i) {
      auto& table = maxdev_by_total[static_cast<size_t>(i)];
      table.resize(static_cast<size_t>((n - 1) * resolution) + 1);
      for (int tu = 0; tu <= (n - 1) * resolution; ++tu) {
        Units t{};
        t[0] = tu;
        table[static_cast<size_t>(tu)] = best_grid_utility(i, t);
      }
    }
  }

  // Enumerate grid profiles and keep the ones where nobody can improve past
  // twice their slack by any grid deviation.
  struct KeptPoint {
    Units units{};  // flattened row-major player coordinates
    double margin = 0.0;
  };
  std::vector<KeptPoint> kept;
  std::vector<int> chosen(static_cast<size_t>(n), 0);
  Units totals{};
  const auto leaf = [&]() {
    double min_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const int* z = strategies[static_cast<size_t>(chosen[static_cast<size_t>(i)])].data();
      Units t{};
      for (int j = 0; j < m; ++j) t[static_cast<size_t>(j)] = totals[static_cast<size_t>(j)] - z[j];
      double best;
      if (n == 1) {
        best = maxdev_solo[static_cast<size_t>(i)];
      } else if (n == 2) {
        best = maxdev_by_strat[static_cast<size_t>(i)][static_cast<size_t>(chosen[static_cast<size_t>(1 - i)])];
      } else {
        best = maxdev_by_total[static_cast<size_t>(i)][static_cast<size_t>(t[0])];
      }
      const double margin = value(i, z, t.data()) - best;
      if (margin < -2.0 * slack[static_cast<size_t>(i)]) return;
      min_margin = std::min(min_margin, margin);
    }
    KeptPoint point;
    point.margin = min_margin;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        point.units[static_cast<size_t>(i * m + j)] =
            strategies[static_cast<size_t>(chosen[static_cast<size_t>(i)])][static_cast<size_t>(j)];
    kept.push_back(point);
  };
  const auto enumerate = [&](auto&& self, int player) -> void {
    if (player == n) {
      leaf();
      return;
    }
    for (int s = 0; s < num_strats; ++s) {
      chosen[static_cast<size_t>(player)] = s;
      for (int j = 0; j < m; ++j) totals[static_cast<size_t>(j)] += strategies[static_cast<size_t>(s)][static_cast<size_t>(j)];
      self(self, player + 1);
      for (int j = 0; j < m; ++j) totals[static_cast<size_t>(j)] -= strategies[static_cast<size_t>(s)][static_cast<size_t>(j)];
    }
  };
  enumerate(enumerate, 0);

  // Cluster survivors that are within one grid step in every coordinate.
  const int dims = n * m;
  std::unordered_map<uint64_t, int> index_of;
  index_of.reserve(kept.size() * 2);
  for (size_t idx = 0; idx < kept.size(); ++idx) index_of.emplace(pack_units(kept[idx].units, dims), static_cast<int>(idx));
  std::vector<int> parent(kept.size());
  for (size_t idx = 0; idx < kept.size(); ++idx) parent[idx] = static_cast<int>(idx);
  const auto find_root = [&](int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  };
  const auto unite = [&](int a, int b) {
    a = find_root(a);
    b = find_root(b);
    if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  };
  {
    std::vector<int> offset(static_cast<size_t>(dims), -1);
    for (size_t idx = 0; idx < kept.size(); ++idx) {
      // Walk the 3^dims neighborhood; pairs are united once from either side.
      std::fill(offset.begin(), offset.end(), -1);
      while (true) {
        Units neighbor = kept[idx].units;
        bool in_range = true;
        for (int d = 0; d < dims && in_range; ++d) {
          neighbor[static_cast<size_t>(d)] += offset[static_cast<size_t>(d)];
          if (neighbor[static_cast<size_t>(d)] < 0 || neighbor[static_cast<size_t>(d)] > resolution) in_range = false;
        }
        if (in_range) {
          const auto it = index_of.find(pack_units(neighbor, dims));
          if (it != index_of.end()) unite(static_cast<int>(idx), it->second);
        }
        int d = 0;
        while (d < dims && offset[static_cast<size_t>(d)] == 1) {
          offset[static_cast<size_t>(d)] = -1;
          ++d;
        }
        if (d == dims) break;
        ++offset[static_cast<size_t>(d)];
      }
    }
  }

  // Cluster representatives: the member with the best worst-player margin,
  // ties broken toward lexicographically smaller coordinates.
  std::unordered_map<int, int> rep_of;
  for (size_t idx = 0; idx < kept.size(); ++idx) {
    const int root = find_root(static_cast<int>(idx));
    const auto it = rep_of.find(root);
    if (it == rep_of.end()) {
      rep_of.emplace(root, static_cast<int>(idx));
      continue;
    }
    const KeptPoint& challenger = kept[idx];
    const KeptPoint& incumbent = kept[static_cast<size_t>(it->second)];
    if (challenger.margin > incumbent.margin ||
        (challenger.margin == incumbent.margin && challenger.units < incumbent.units))
      it->second = static_cast<int>(idx);
  }

  // Refine: each representative must verify as feasible with per-player
  // utility gaps at grid scale.
  double max_slack = 0.0;
  for (double s : slack) max_slack = std::max(max_slack, s);
  std::vector<StrategyProfile> survivors;
  std::vector<int> reps;
  reps.reserve(rep_of.size());
  for (const auto& entry : rep_of) reps.push_back(entry.second);
  std::sort(reps.begin(), reps.end());
  for (int rep : reps) {
    StrategyProfile profile(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        profile(i, j) = kept[static_cast<size_t>(rep)].units[static_cast<size_t>(i * m + j)] * h;
    const GneReport report = verify_gne(game, profile, std::numeric_limits<double>::infinity(),
                                        std::numeric_limits<double>::infinity());
    if (!report.feasible) continue;
    bool close = true;
    for (int i = 0; i < n; ++i) {
      if (report.utility_gap[static_cast<size_t>(i)] > 4.0 * slack[static_cast<size_t>(i)] + 1e-12) {
        close = false;
        break;
      }
    }
    if (close) survivors.push_back(std::move(profile));
  }
  return assemble_set(std::move(survivors), 1e-6);
}

AntichainResult antichain_check(const GneSet& set, double tol) {
  if (!(tol >= 0.0)) throw ValidationError("tol: must be >= 0");
  AntichainResult result;
  const int count = static_cast<int>(set.points.size());
  for (int x = 0; x < count; ++x) {
    for (int y = 0; y < count; ++y) {
      if (x == y) continue;
      const std::vector<double>& vx = set.totals[static_cast<size_t>(x)];
      const std::vector<double>& vy = set.totals[static_cast<size_t>(y)];
      bool below = true;
      double sum_x = 0.0;
      double sum_y = 0.0;
      for (size_t j = 0; j < vx.size(); ++j) {
        if (vx[j] > vy[j] + tol) {
          below = false;
          break;
        }
        sum_x += vx[j];
        sum_y += vy[j];
      }
      if (below && sum_x < sum_y - tol) {
        result.ok = false;
        result.first = x;
        result.second = y;
        return result;
      }
    }
  }
  return result;
}

TypeClassification classify_types(const GameSpec& game, const StrategyProfile& profile,
                                  const SolverConfig& cfg) {
  const int n = game.num_players();
  const int m = game.num_cprs();
  TypeClassification out;
  out.player_kind.resize(static_cast<size_t>(n));
  out.kappa0.assign(static_cast<size_t>(n), 0.0);
  out.support.resize(static_cast<size_t>(m));
  out.support_type1.resize(static_cast<size_t>(m));
  out.support_type2.resize(static_cast<size_t>(m));

  for (int i = 0; i < n; ++i) {
    const BestResponse br = best_response(game, i, profile, cfg);
    out.player_kind[static_cast<size_t>(i)] = br.kind;
    out.kappa0[static_cast<size_t>(i)] = br.kappa0;
  }
  for (int j = 0; j < m; ++j) {
    const double total = profile.total(j);
    for (int i = 0; i < n; ++i) {
      if (!(profile(i, j) > 0.0) || !(total < omega(game, i, j, cfg))) continue;
      out.support[static_cast<size_t>(j)].push_back(i);
      if (out.player_kind[static_cast<size_t>(i)] == ResponseKind::kTypeI)
        out.support_type1[static_cast<size_t>(j)].push_back(i);
      else
        out.support_type2[static_cast<size_t>(j)].push_back(i);
    }
  }
  return out;
}

bool count_bound_check(const GneSet& set, int n, int m) {
  if (n < 1 || m < 1) throw ValidationError("count_bound_check: n and m must be >= 1");
  const size_t count = set.points.size();
  const int exponent = n * (m + 1);
  if (exponent >= 63) return true;  // the ceiling exceeds any feasible set size
  const uint64_t bound = uint64_t{1} << exponent;

  std::vector<char> grouped(count, 0);
  for (size_t x = 0; x < count; ++x) {
    if (grouped[x]) continue;
    uint64_t group_size = 0;
    for (size_t y = x; y < count; ++y) {
      if (grouped[y]) continue;
      double dist = 0.0;
      for (size_t j = 0; j < set.totals[x].size(); ++j)
        dist = std::max(dist, std::abs(set.totals[x][j] - set.totals[y][j]));
      if (dist <= set.dedup_eps) {
        grouped[y] = 1;
        ++group_size;
      }
    }
    if (group_size > bound) return false;
  }
  return true;
}

}  // namespace fcpr
