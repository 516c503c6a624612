#include "gpdr/repair.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace gpdr;

namespace {

std::vector<ExprTree> sample_trees(int depth, int count) {
  Rng rng(derive_seed(7, stream::init, static_cast<std::uint64_t>(depth)));
  std::vector<ExprTree> trees;
  while (static_cast<int>(trees.size()) < count)
    trees.push_back(random_tree(2, depth, GrowMethod::Grow, rng));
  return trees;
}

void BM_solve_repair(benchmark::State& state) {
  const auto trees = sample_trees(static_cast<int>(state.range(0)), 32);
  std::size_t i = 0;
  std::int64_t nodes = 0;
  for (auto _ : state) {
    const RepairProblem p = build_problem(trees[i], DimExp(1));
    benchmark::DoNotOptimize(solve_repair(p));
    nodes += trees[i].size();
    i = (i + 1) % trees.size();
  }
  state.SetItemsProcessed(nodes);  // nodes retyped per second
}
BENCHMARK(BM_solve_repair)->Arg(3)->Arg(5)->Arg(8);

void BM_repair_individual(benchmark::State& state) {
  Rng init(derive_seed(8, stream::init));
  const auto pop = ramped_init(256, init);
  Rng rng(derive_seed(8, stream::repair));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(repair_individual(pop[i], nullptr, rng));
    i = (i + 1) % pop.size();
  }
}
BENCHMARK(BM_repair_individual);

void BM_ramped_init(benchmark::State& state) {
  Rng rng(derive_seed(9, stream::init));
  for (auto _ : state) benchmark::DoNotOptimize(ramped_init(256, rng));
}
BENCHMARK(BM_ramped_init)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
