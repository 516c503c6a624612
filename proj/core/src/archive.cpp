#include "gpdr/archive.hpp"

#include <cmath>

namespace gpdr {

bool dominates(const ArchiveEntry& a, const ArchiveEntry& b) {
  return a.fitness <= b.fitness && a.size <= b.size &&
         (a.fitness < b.fitness || a.size < b.size);
}

bool same_schedule(const ArchiveEntry& a, const ArchiveEntry& b, double tol) {
  if (a.schedule.size() != b.schedule.size()) return false;
  for (std::size_t i = 0; i < a.schedule.size(); ++i)
    if (std::abs(a.schedule[i] - b.schedule[i]) > tol) return false;
  return true;
}

std::vector<int> nondominated_front(const std::vector<ArchiveEntry>& pop) {
  std::vector<int> front;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pop.size() && !dominated; ++j)
      if (j != i && dominates(pop[j], pop[i])) dominated = true;
    if (!dominated) front.push_back(static_cast<int>(i));
  }
  return front;
}

void archive_update(const std::vector<ArchiveEntry>& evaluated_pop,
                    std::vector<ArchiveEntry>& archive) {
  for (int idx : nondominated_front(evaluated_pop)) {
    const ArchiveEntry& cand = evaluated_pop[idx];
    bool rejected = false;
    for (std::size_t j = 0; j < archive.size();) {
      const ArchiveEntry& member = archive[j];
      if (dominates(member, cand)) {
        rejected = true;
        break;
      }
      if (dominates(cand, member)) {
        archive.erase(archive.begin() + j);
        continue;
      }
      if (same_schedule(cand, member)) {
        // duplicate schedules keep the smaller program; ties keep the incumbent
        if (cand.size < member.size) {
          archive.erase(archive.begin() + j);
          continue;
        }
        rejected = true;
        break;
      }
      ++j;
    }
    if (!rejected) archive.push_back(cand);
  }
}

TerminalFreqs terminal_frequencies(const std::vector<ArchiveEntry>& archive) {
  TerminalFreqs freqs{};
  auto count = [&freqs](const ExprNode& n, auto&& self) -> void {
    if (n.leaf) {
      ++freqs[static_cast<std::size_t>(n.term)];
      return;
    }
    for (const auto& c : n.children) self(c, self);
  };
  for (const auto& entry : archive) {
    count(entry.ind.tree1, count);
    count(entry.ind.tree2, count);
  }
  return freqs;
}

}  // namespace gpdr
