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

#include <benchmark/benchmark.h>

#include "fcpr/dynamics.hpp"
#include "fcpr/equilibrium.hpp"
#include "fcpr/solver.hpp"

namespace {

fcpr::GameSpec symmetric_game(int n, int m, double a, double k, double c, double q) {
  std::vector<fcpr::PlayerParams> players(static_cast<size_t>(n), fcpr::PlayerParams{a, k});
  std::vector<fcpr::CprSpec> cprs(
      static_cast<size_t>(m),
      fcpr::CprSpec{fcpr::FailureSpec::power(q), fcpr::ReturnSpec::constant(c)});
  return fcpr::build_game(std::move(players), std::move(cprs));
}

void bm_viability_threshold(benchmark::State& state) {
  for (auto _ : state) {
    // Rebuild so each iteration pays for the root solve, not a cache hit.
    fcpr::GameSpec game = symmetric_game(1, 1, 0.7, 1.5, 2.0, 2.0);
    benchmark::DoNotOptimize(fcpr::omega(game, 0, 0));
  }
}
BENCHMARK(bm_viability_threshold);

void bm_best_response(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  fcpr::GameSpec game = symmetric_game(2, m, 0.8, 1.0, 6.0, 2.0);
  fcpr::StrategyProfile profile(2, m);
  for (int j = 0; j < m; ++j) profile(1, j) = 0.5 / m;
  for (auto _ : state) benchmark::DoNotOptimize(fcpr::best_response(game, 0, profile));
}
BENCHMARK(bm_best_response)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void bm_dynamics_run(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  fcpr::GameSpec game = symmetric_game(n, 2, 1.0, 1.0, 4.0, 2.0);
  fcpr::StrategyProfile start(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(fcpr::run(game, start));
}
BENCHMARK(bm_dynamics_run)->Arg(2)->Arg(5)->Arg(10);

void bm_find_gne(benchmark::State& state) {
  fcpr::GameSpec game = symmetric_game(3, 1, 1.0, 1.0, 1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(fcpr::find_gne(game, 5, 42));
}
BENCHMARK(bm_find_gne);

}  // namespace

BENCHMARK_MAIN();
