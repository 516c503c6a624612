#include "gpdr/engine.hpp"

#include "gpdr/parallel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpdr {

void EngineConfig::validate() const {
  if (pop_size <= 0 || generations <= 0 || tournament_size <= 0 || train_replications <= 0 ||
      test_replications <= 0)
    throw std::invalid_argument("engine counts must be positive");
  if (p_crossover < 0.0 || p_mutation < 0.0 ||
      std::abs(p_crossover + p_mutation - 1.0) > 1e-12)
    throw std::invalid_argument("crossover and mutation rates must sum to 1");
}

std::vector<Individual> breed(const std::vector<ArchiveEntry>& pool, const EngineConfig& cfg,
                              Rng& rng) {
  auto tournament = [&]() -> const Individual& {
    int best = -1;
    double best_fitness = std::numeric_limits<double>::infinity();
    for (int t = 0; t < cfg.tournament_size; ++t) {
      const int c = static_cast<int>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1));
      if (pool[c].fitness < best_fitness) {
        best_fitness = pool[c].fitness;
        best = c;
      }
    }
    return pool[best].ind;
  };

  std::vector<Individual> next;
  next.reserve(cfg.pop_size);
  while (static_cast<int>(next.size()) < cfg.pop_size) {
    if (rng.uniform() < cfg.p_crossover) {
      const Individual& p1 = tournament();
      const Individual& p2 = tournament();
      auto [o1, o2] = cs_crossover(p1, p2, rng);
      o1.fitness.reset();
      o2.fitness.reset();
      next.push_back(std::move(o1));
      if (static_cast<int>(next.size()) < cfg.pop_size) next.push_back(std::move(o2));
    } else {
      Individual o = tournament();
      subtree_mutation(o, rng);
      next.push_back(std::move(o));
    }
  }
  return next;
}

namespace {

struct RepairWave {
  int solver_calls = 0;
  int mutations = 0;
  int fallbacks = 0;
};

// One repaired wave; streams derive from the generation the population will
// be evaluated in and the individual's slot, independent of scheduling.
RepairWave repair_population(std::vector<Individual>& pop, const TerminalFreqs* freqs,
                             const EngineConfig& cfg, std::uint64_t eval_generation,
                             int workers) {
  std::vector<RepairStats> stats(pop.size());
  parallel_for(pop.size(), workers, [&](std::size_t i) {
    Rng rng(derive_seed(cfg.master_seed, stream::repair, eval_generation, i));
    pop[i] = repair_individual(pop[i], freqs, rng, &stats[i]);
  });
  RepairWave wave;
  for (const auto& s : stats) {
    wave.solver_calls += s.solver_calls;
    wave.mutations += s.infeasible_mutations;
    wave.fallbacks += s.fallbacks;
  }
  return wave;
}

const ArchiveEntry& pick_best(const std::vector<ArchiveEntry>& archive) {
  const ArchiveEntry* best = &archive.front();
  for (const auto& e : archive)
    if (e.fitness < best->fitness || (e.fitness == best->fitness && e.size < best->size))
      best = &e;
  return *best;
}

}  // namespace

RunResult run(const EngineConfig& cfg, const ClinicConfig& clinic) {
  cfg.validate();
  const int workers = worker_count(cfg.workers);

  Rng init_rng(derive_seed(cfg.master_seed, stream::init));
  std::vector<Individual> pop = ramped_init(cfg.pop_size, init_rng);

  RunResult result;
  RepairWave wave;
  if (cfg.repair_enabled) wave = repair_population(pop, nullptr, cfg, 0, workers);

  for (int gen = 0; gen < cfg.generations; ++gen) {
    const ReplicationPlan plan{cfg.train_replications, cfg.master_seed,
                               static_cast<std::uint64_t>(gen)};
    std::vector<ArchiveEntry> evaluated(pop.size());
    std::vector<double> gaps(pop.size());
    parallel_for(pop.size(), workers, [&](std::size_t i) {
      std::vector<double> schedule = compute_schedule(pop[i], clinic);
      const double fitness = mean_tc(schedule, clinic, plan);
      pop[i].fitness = fitness;
      gaps[i] = individual_dim_gap(pop[i]).to_double();
      evaluated[i] = {pop[i], fitness, pop[i].size(), std::move(schedule)};
    });

    archive_update(evaluated, result.archive);

    GenerationStats gs;
    gs.generation = gen;
    gs.best_fitness = std::numeric_limits<double>::infinity();
    double fit_sum = 0.0, size_sum = 0.0, gap_sum = 0.0;
    for (std::size_t i = 0; i < evaluated.size(); ++i) {
      gs.best_fitness = std::min(gs.best_fitness, evaluated[i].fitness);
      fit_sum += evaluated[i].fitness;
      size_sum += evaluated[i].size;
      gap_sum += gaps[i];
    }
    gs.mean_fitness = fit_sum / evaluated.size();
    gs.mean_size = size_sum / evaluated.size();
    gs.mean_dim_gap = gap_sum / evaluated.size();
    gs.archive_size = static_cast<int>(result.archive.size());
    gs.repair_solver_calls = wave.solver_calls;
    gs.repair_mutations = wave.mutations;
    gs.repair_fallbacks = wave.fallbacks;
    result.stats.push_back(gs);
    wave = RepairWave{};

    if (gen + 1 == cfg.generations) break;

    const TerminalFreqs freqs = terminal_frequencies(result.archive);
    std::vector<ArchiveEntry> pool = evaluated;
    pool.insert(pool.end(), result.archive.begin(), result.archive.end());
    Rng breed_rng(derive_seed(cfg.master_seed, stream::breed, static_cast<std::uint64_t>(gen)));
    pop = breed(pool, cfg, breed_rng);
    if (cfg.repair_enabled)
      wave = repair_population(pop, &freqs, cfg, static_cast<std::uint64_t>(gen) + 1, workers);
  }

  result.best = pick_best(result.archive);
  return result;
}

}  // namespace gpdr
