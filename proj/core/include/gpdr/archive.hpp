#pragma once

#include "gpdr/repair.hpp"
#include "gpdr/tree.hpp"

#include <vector>

namespace gpdr {

inline constexpr double kDuplicateScheduleTol = 1e-9;

struct ArchiveEntry {
  Individual ind;
  double fitness = 0.0;
  int size = 0;
  std::vector<double> schedule;  // under the training clinic
};

// Pareto dominance under minimize(fitness, size).
bool dominates(const ArchiveEntry& a, const ArchiveEntry& b);
bool same_schedule(const ArchiveEntry& a, const ArchiveEntry& b,
                   double tol = kDuplicateScheduleTol);

std::vector<int> nondominated_front(const std::vector<ArchiveEntry>& pop);

// Folds the population's non-dominated front into the archive: candidates
// dominated by a member are rejected, members dominated by a candidate are
// removed, and schedule duplicates keep the smaller program (ties keep the
// incumbent). The archive stays mutually non-dominated and duplicate-free.
void archive_update(const std::vector<ArchiveEntry>& evaluated_pop,
                    std::vector<ArchiveEntry>& archive);

// Terminal-node occurrence counts across all archive trees; ephemerals count
// under their symbol.
TerminalFreqs terminal_frequencies(const std::vector<ArchiveEntry>& archive);

}  // namespace gpdr
