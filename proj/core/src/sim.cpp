#include "gpdr/sim.hpp"

#include "gpdr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace gpdr {

ClinicConfig ClinicConfig::make(int patients, double cv, double p_no_show, double p_walkin,
                                double session, double cost_ratio) {
  ClinicConfig c;
  c.P = patients;
  c.L = session;
  c.M = session / patients;
  c.V = cv * c.M;
  c.PN = p_no_show;
  c.PW = p_walkin;
  c.CR = cost_ratio;
  return c;
}

std::string ClinicConfig::label() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "P=%d M=%.4g V=%.4g PN=%.4g PW=%.4g", P, M, V, PN, PW);
  return buf;
}

std::pair<double, double> lognormal_params(double mean, double stddev) {
  const double ratio = stddev / mean;
  const double sigma2 = std::log1p(ratio * ratio);
  return {std::log(mean) - sigma2 / 2.0, std::sqrt(sigma2)};
}

std::vector<double> sample_walkins(const ClinicConfig& clinic, Rng& rng) {
  const int count = rng.poisson(clinic.PW * clinic.P);
  std::vector<double> times(count);
  for (int k = 0; k < count; ++k) times[k] = rng.uniform() * clinic.L;
  std::sort(times.begin(), times.end());
  return times;
}

ReplicationDraws draw_replication(const ClinicConfig& clinic, Rng& rng) {
  ReplicationDraws d;
  d.no_show.resize(clinic.P);
  for (int i = 0; i < clinic.P; ++i) d.no_show[i] = rng.uniform() < clinic.PN ? 1 : 0;
  const auto [mu, sigma] = lognormal_params(clinic.M, clinic.V);
  d.service.resize(clinic.P);
  for (int i = 0; i < clinic.P; ++i) d.service[i] = rng.lognormal(mu, sigma);
  d.walkin_time = sample_walkins(clinic, rng);
  d.walkin_service.resize(d.walkin_time.size());
  for (auto& s : d.walkin_service) s = rng.lognormal(mu, sigma);
  return d;
}

namespace {

struct Arrival {
  double time;
  int walkin;  // sort key: scheduled before walk-ins at the same instant
  double service;
};

}  // namespace

SimOutcome simulate(const std::vector<double>& schedule, const ClinicConfig& clinic,
                    const ReplicationDraws& draws, SimTrace* trace) {
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 0.0 || schedule[i] > clinic.L ||
        (i > 0 && schedule[i] < schedule[i - 1]))
      throw std::invalid_argument("schedule must be non-decreasing within [0, L]");
  }

  std::vector<Arrival> arrivals;
  arrivals.reserve(schedule.size() + draws.walkin_time.size());
  for (std::size_t i = 0; i < schedule.size(); ++i)
    if (!draws.no_show[i]) arrivals.push_back({schedule[i], 0, draws.service[i]});
  for (std::size_t k = 0; k < draws.walkin_time.size(); ++k)
    arrivals.push_back({draws.walkin_time[k], 1, draws.walkin_service[k]});
  std::stable_sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
    return a.time != b.time ? a.time < b.time : a.walkin < b.walkin;
  });

  constexpr double inf = std::numeric_limits<double>::infinity();
  double now = 0.0;
  bool busy = false;
  double completion = 0.0;
  double free_since = 0.0;
  double idle_total = 0.0, busy_total = 0.0, wait_total = 0.0;
  double last_completion = 0.0;
  int served = 0;
  std::size_t next = 0;
  std::vector<Arrival> queue;

  for (;;) {
    // ingest every arrival up to the current instant (completion events at
    // the same instant were already handled when `now` advanced)
    while (next < arrivals.size() && arrivals[next].time <= now) {
      const Arrival& a = arrivals[next++];
      const std::size_t pos =
          a.walkin ? std::min<std::size_t>(3, queue.size()) : queue.size();
      queue.insert(queue.begin() + pos, a);
    }
    if (!busy && !queue.empty()) {
      const Arrival p = queue.front();
      queue.erase(queue.begin());
      if (now > free_since && trace) trace->idle_gaps.emplace_back(free_since, now);
      idle_total += now - free_since;
      wait_total += now - p.time;
      ++served;
      busy = true;
      completion = now + p.service;
      busy_total += p.service;
      if (trace) trace->served.push_back({p.walkin != 0, p.time, now, completion});
      continue;
    }
    const double t_arrival = next < arrivals.size() ? arrivals[next].time : inf;
    const double t_completion = busy ? completion : inf;
    if (t_arrival == inf && t_completion == inf) break;
    if (t_completion <= t_arrival) {
      now = t_completion;
      busy = false;
      free_since = now;
      last_completion = now;
    } else {
      now = t_arrival;
    }
  }
  // the doctor waits out the rest of the session once no work remains
  if (free_since < clinic.L) {
    if (trace) trace->idle_gaps.emplace_back(free_since, clinic.L);
    idle_total += clinic.L - free_since;
  }

  SimOutcome out;
  out.over = std::max(0.0, last_completion - clinic.L) / clinic.P;
  out.idle = idle_total / clinic.P;
  out.wait = served > 0 ? wait_total / served : 0.0;
  out.tc = out.wait + clinic.CR * (10.0 * out.idle + 15.0 * out.over);
  if (trace) {
    trace->busy = busy_total;
    trace->last_completion = last_completion;
  }
  return out;
}

SimOutcome simulate_once(const std::vector<double>& schedule, const ClinicConfig& clinic,
                         Rng& rng) {
  return simulate(schedule, clinic, draw_replication(clinic, rng));
}

double mean_tc(const std::vector<double>& schedule, const ClinicConfig& clinic,
               const ReplicationPlan& plan, int workers) {
  constexpr std::size_t kChunk = 512;
  const double total = chunked_sum(plan.count, workers, kChunk, [&](std::size_t r) {
    Rng rng(replication_seed(plan, static_cast<int>(r)));
    return simulate_once(schedule, clinic, rng).tc;
  });
  return total / plan.count;
}

double evaluate_fitness(const Individual& ind, const ClinicConfig& clinic,
                        const ReplicationPlan& plan) {
  return mean_tc(compute_schedule(ind, clinic), clinic, plan);
}

TestEvaluation evaluate_schedule_on_test(const std::vector<double>& schedule,
                                         const ClinicConfig& clinic,
                                         std::uint64_t master_seed, int replications,
                                         int workers) {
  constexpr int kBatches = 30;
  // round down to whole batches so each batch mean is identically distributed
  const int per_batch = std::max(1, replications / kBatches);
  const int batches = std::min(kBatches, replications);
  const int used = per_batch * batches;
  const ReplicationPlan plan{used, master_seed, kTestGeneration};

  std::vector<double> batch_sum(batches, 0.0);
  parallel_for(batches, workers, [&](std::size_t b) {
    double s = 0.0;
    for (int r = static_cast<int>(b) * per_batch; r < static_cast<int>(b + 1) * per_batch; ++r) {
      Rng rng(replication_seed(plan, r));
      s += simulate_once(schedule, clinic, rng).tc;
    }
    batch_sum[b] = s;
  });

  double total = 0.0;
  for (double s : batch_sum) total += s;
  const double mean = total / used;

  double ss = 0.0;
  for (double s : batch_sum) {
    const double d = s / per_batch - mean;
    ss += d * d;
  }
  TestEvaluation ev;
  ev.mean_tc = mean;
  ev.replications = used;
  if (batches > 1) {
    const double var = ss / (batches - 1);
    // 97.5% Student-t quantile at 29 degrees of freedom (30 batches)
    constexpr double kT975Df29 = 2.0452296421327034;
    ev.ci_half_width = kT975Df29 * std::sqrt(var / batches);
  }
  return ev;
}

}  // namespace gpdr
