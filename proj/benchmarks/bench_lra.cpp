#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "lmt/lra.hpp"

namespace {

// A dense random system over n variables in [-10, 10], with 2n
// constraints that keep the origin feasible.
lmt::LinSystem random_system(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> rhs(1, 20);
  lmt::LinSystem system;
  for (int i = 0; i < n; ++i) system.add_variable("x" + std::to_string(i), -10, 10);
  for (int k = 0; k < 2 * n; ++k) {
    lmt::LinExpr e;
    for (int i = 0; i < n; ++i) e.add_term("x" + std::to_string(i), coef(rng));
    if (e.is_constant()) continue;
    system.add(std::move(e), lmt::BoundKind::kLe, lmt::DeltaRational(rhs(rng)));
  }
  return system;
}

lmt::LinExpr sum_objective(int n) {
  lmt::LinExpr e;
  for (int i = 0; i < n; ++i) e.add_term("x" + std::to_string(i), i % 2 == 0 ? 1 : -2);
  return e;
}

void BM_Feasible(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const lmt::LinSystem system = random_system(n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(lmt::feasible(system));
}
BENCHMARK(BM_Feasible)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_Minimize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const lmt::LinSystem system = random_system(n, 11);
  const lmt::LinExpr objective = sum_objective(n);
  for (auto _ : state) benchmark::DoNotOptimize(lmt::minimize(objective, system));
}
BENCHMARK(BM_Minimize)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_MinimizeLexicographic(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const lmt::LinSystem system = random_system(n, 13);
  std::vector<lmt::LinExpr> objectives{sum_objective(n)};
  for (int i = 0; i < n; ++i) objectives.push_back(lmt::LinExpr::variable("x" + std::to_string(i)));
  for (auto _ : state) benchmark::DoNotOptimize(lmt::minimize_lexicographic(objectives, system));
}
BENCHMARK(BM_MinimizeLexicographic)->Arg(4)->Arg(8)->Arg(16);

}  // namespace
