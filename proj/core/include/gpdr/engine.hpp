#pragma once

#include "gpdr/archive.hpp"
#include "gpdr/sim.hpp"

#include <cstdint>
#include <vector>

namespace gpdr {

struct EngineConfig {
  int pop_size = 256;
  int generations = 50;
  int tournament_size = 7;
  double p_crossover = 0.9;
  double p_mutation = 0.1;
  int train_replications = 500;
  int test_replications = 15000;
  std::uint64_t master_seed = 0;
  bool repair_enabled = true;
  int workers = 0;  // 0: GPDR_WORKERS env var, then hardware concurrency

  void validate() const;  // throws std::invalid_argument
};

struct GenerationStats {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double mean_size = 0.0;
  double mean_dim_gap = 0.0;  // nonzero only in standard-GP mode
  int archive_size = 0;
  int repair_solver_calls = 0;
  int repair_mutations = 0;
  int repair_fallbacks = 0;
};

// Tournament selection over population ∪ archive; crossover with probability
// p_crossover (two offspring), else mutation. Produces exactly pop_size
// offspring with fitness cleared.
std::vector<Individual> breed(const std::vector<ArchiveEntry>& mating_pool,
                              const EngineConfig& config, Rng& rng);

struct RunResult {
  ArchiveEntry best;
  std::vector<ArchiveEntry> archive;
  std::vector<GenerationStats> stats;
};

// Ramped init → repair → per generation: evaluate under common random numbers,
// archive update, frequency stats, breeding over pop ∪ archive, offspring
// repair. Returns the minimum-fitness archive entry (ties: smaller, earlier).
// With repair disabled the loop runs as standard GP and records dimension gaps.
RunResult run(const EngineConfig& config, const ClinicConfig& clinic);

}  // namespace gpdr
