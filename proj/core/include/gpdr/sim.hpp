#pragma once

#include "gpdr/rng.hpp"
#include "gpdr/tree.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gpdr {

struct ClinicConfig {
  int P = 10;         // scheduled patients per session
  double L = 210.0;   // session length, minutes
  double M = 21.0;    // mean service time = L/P
  double V = 8.4;     // service time standard deviation = CV·M
  double PN = 0.0;    // no-show probability
  double PW = 0.0;    // expected walk-ins per slot (session total PW·P)
  double CR = 0.1;    // doctor-time vs patient-time cost ratio

  static ClinicConfig make(int patients, double cv, double p_no_show, double p_walkin,
                           double session = 210.0, double cost_ratio = 0.1);
  std::string label() const;
};

struct SimOutcome {
  double wait = 0.0;  // mean wait over served patients
  double idle = 0.0;  // unoccupied doctor time per scheduled patient
  double over = 0.0;  // overtime per scheduled patient
  double tc = 0.0;    // wait + CR·(10·idle + 15·over)
};

// Seed derivation is a pure function of (master_seed, generation, replication),
// so every individual in a generation sees common random numbers.
struct ReplicationPlan {
  int count = 500;
  std::uint64_t master_seed = 0;
  std::uint64_t generation = 0;  // kTestGeneration for held-out evaluation
};

inline std::uint64_t replication_seed(const ReplicationPlan& plan, int replication) {
  return derive_seed(plan.master_seed, stream::simulation, plan.generation,
                     static_cast<std::uint64_t>(replication));
}

std::pair<double, double> lognormal_params(double mean, double stddev);  // (mu, sigma)

// Homogeneous Poisson arrivals on [0, L] with rate PW·P/L, sorted ascending.
std::vector<double> sample_walkins(const ClinicConfig& clinic, Rng& rng);

// One replication's randomness, drawn in a fixed schedule-independent order:
// P no-show uniforms, P service times, walk-in count, walk-in arrival times,
// walk-in service times.
struct ReplicationDraws {
  std::vector<std::uint8_t> no_show;
  std::vector<double> service;
  std::vector<double> walkin_time;     // sorted
  std::vector<double> walkin_service;
};

ReplicationDraws draw_replication(const ClinicConfig& clinic, Rng& rng);

struct ServedRecord {
  bool walkin;
  double arrival;  // appointment time for scheduled patients
  double start;
  double end;
};

struct SimTrace {
  std::vector<ServedRecord> served;
  std::vector<std::pair<double, double>> idle_gaps;  // within [0, session end]
  double busy = 0.0;
  double last_completion = 0.0;
};

SimOutcome simulate(const std::vector<double>& schedule, const ClinicConfig& clinic,
                    const ReplicationDraws& draws, SimTrace* trace = nullptr);
SimOutcome simulate_once(const std::vector<double>& schedule, const ClinicConfig& clinic, Rng& rng);

double mean_tc(const std::vector<double>& schedule, const ClinicConfig& clinic,
               const ReplicationPlan& plan, int workers = 1);
double evaluate_fitness(const Individual& ind, const ClinicConfig& clinic,
                        const ReplicationPlan& plan);

struct TestEvaluation {
  double mean_tc = 0.0;
  double ci_half_width = 0.0;  // 95%, batch means
  int replications = 0;
};

// Held-out evaluation under the reserved generation label; replications are
// grouped into 30 batches (count rounds down to a multiple of 30).
TestEvaluation evaluate_schedule_on_test(const std::vector<double>& schedule,
                                         const ClinicConfig& clinic,
                                         std::uint64_t master_seed, int replications,
                                         int workers = 0);

}  // namespace gpdr
