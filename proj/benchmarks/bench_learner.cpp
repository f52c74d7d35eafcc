#include <benchmark/benchmark.h>

#include <random>

#include "lmt/learner.hpp"
#include "lmt/tasks.hpp"

namespace {

void BM_ReducedQp(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t features = 8, examples = 10;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> delta(-3, 3), loss(1, 4);
  lmt::WorkingSet ws;
  for (std::size_t k = 0; k < rows; ++k) {
    lmt::WorkingConstraint c;
    c.example = k % examples;
    c.output.set_bool("row" + std::to_string(k), true);
    for (std::size_t j = 0; j < features; ++j) c.delta_psi.push_back(delta(rng));
    c.loss = loss(rng);
    ws.push_back(std::move(c));
  }
  for (auto _ : state) benchmark::DoNotOptimize(lmt::solve_reduced_qp(ws, 100, examples, features));
}
BENCHMARK(BM_ReducedQp)->Arg(20)->Arg(80)->Arg(320)->Unit(benchmark::kMillisecond);

void BM_TrainHousing(benchmark::State& state) {
  lmt::HousingConfig config;
  config.examples = static_cast<std::size_t>(state.range(0));
  const lmt::Dataset data = lmt::gen_housing_dataset(config, 42);
  lmt::TrainingOptions options;
  options.c = 100;
  for (auto _ : state) benchmark::DoNotOptimize(lmt::train(data.problem, data.examples, options));
}
BENCHMARK(BM_TrainHousing)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace
