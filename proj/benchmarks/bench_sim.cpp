#include "gpdr/rules.hpp"
#include "gpdr/sim.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace gpdr;

namespace {

ClinicConfig clinic_for(int patients) { return ClinicConfig::make(patients, 0.6, 0.15, 0.15); }

void BM_draw_replication(benchmark::State& state) {
  const ClinicConfig clinic = clinic_for(static_cast<int>(state.range(0)));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(draw_replication(clinic, rng));
}
BENCHMARK(BM_draw_replication)->Arg(10)->Arg(20);

void BM_simulate(benchmark::State& state) {
  const ClinicConfig clinic = clinic_for(static_cast<int>(state.range(0)));
  const auto schedule = rule_schedule(RuleName::IBFI, clinic);
  Rng rng(2);
  std::vector<ReplicationDraws> draws;
  for (int i = 0; i < 64; ++i) draws.push_back(draw_replication(clinic, rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(schedule, clinic, draws[i]));
    i = (i + 1) % draws.size();
  }
}
BENCHMARK(BM_simulate)->Arg(10)->Arg(20);

void BM_mean_tc_training(benchmark::State& state) {
  const ClinicConfig clinic = clinic_for(10);
  const auto schedule = rule_schedule(RuleName::Dome, clinic);
  const ReplicationPlan plan{500, 42, 0};
  for (auto _ : state) benchmark::DoNotOptimize(mean_tc(schedule, clinic, plan, 1));
}
BENCHMARK(BM_mean_tc_training)->Unit(benchmark::kMillisecond);

void BM_held_out_evaluation(benchmark::State& state) {
  const ClinicConfig clinic = clinic_for(10);
  const auto schedule = rule_schedule(RuleName::IBFI, clinic);
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_schedule_on_test(schedule, clinic, 42, 15000, 1));
}
BENCHMARK(BM_held_out_evaluation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
