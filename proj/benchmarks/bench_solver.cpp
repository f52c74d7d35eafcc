#include <benchmark/benchmark.h>

#include "lmt/solver.hpp"
#include "lmt/tasks.hpp"

namespace {

// A cycle of weighted equivalences with a pull towards false on every
// Boolean: the optimum needs a real search over assignments.
lmt::Problem boolean_ring(int n) {
  lmt::Problem p;
  for (int i = 0; i < n; ++i) p.variables.push_back({"b" + std::to_string(i), lmt::Sort::kBool, 0, 0});
  for (int i = 0; i < n; ++i) {
    const auto a = lmt::Formula::bool_var("b" + std::to_string(i));
    const auto b = lmt::Formula::bool_var("b" + std::to_string((i + 1) % n));
    p.soft.push_back({"s" + std::to_string(i), lmt::Formula::iff(a, b), lmt::CostKind::kBoolean, i % 5 + 1, 1});
    p.soft.push_back({"t" + std::to_string(i), !a, lmt::CostKind::kBoolean, 1, 1});
  }
  return p;
}

void BM_MaxSmtRing(benchmark::State& state) {
  const lmt::Problem p = boolean_ring(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lmt::solve_maxsmt(p));
}
BENCHMARK(BM_MaxSmtRing)->Arg(6)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

template <class Config, class Gen>
void infer_first_example(benchmark::State& state, Config config, Gen gen) {
  config.examples = 1;
  const lmt::Dataset data = gen(config, 42);
  lmt::Problem p = lmt::with_weights(data.problem, data.true_weights);
  p.evidence = data.examples.front().evidence;
  for (auto _ : state) benchmark::DoNotOptimize(lmt::solve(p));
}

void BM_HousingInference(benchmark::State& state) {
  lmt::HousingConfig config;
  config.locations = static_cast<std::size_t>(state.range(0));
  infer_first_example(state, config, lmt::gen_housing_dataset);
}
BENCHMARK(BM_HousingInference)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ActivityInference(benchmark::State& state) {
  lmt::ActivityConfig config;
  config.activities = static_cast<std::size_t>(state.range(0));
  infer_first_example(state, config, lmt::gen_activity_dataset);
}
BENCHMARK(BM_ActivityInference)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
